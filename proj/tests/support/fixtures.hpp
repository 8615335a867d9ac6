#pragma once

#include <string>

#include "hyperq/hyperq.hpp"

namespace fx {

using namespace hyperq;

inline const Signature& binary() {
  static const Signature sig = parse_signature("sig f/2");
  return sig;
}

inline FiniteAlgebra magma(std::string name, std::size_t n, Table t) {
  return FiniteAlgebra(std::move(name), binary(), n, {std::move(t)});
}

// f(a,b) = a
inline FiniteAlgebra left_zero(std::size_t n = 2) {
  Table t;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t.push_back(static_cast<Element>(a));
  return magma("left_zero", n, t);
}

// f(a,b) = b
inline FiniteAlgebra right_zero(std::size_t n = 2) {
  Table t;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t.push_back(static_cast<Element>(b));
  return magma("right_zero", n, t);
}

inline FiniteAlgebra semilattice() { return magma("semilattice", 2, {0, 0, 0, 1}); }

inline FiniteAlgebra cyclic(std::size_t n) {
  Table t;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t.push_back(static_cast<Element>((a + b) % n));
  return magma("z" + std::to_string(n), n, t);
}

inline const char* const s1 = "f(x,f(y,z)) = f(f(x,y),z)";
inline const char* const s2 = "f(x,x) = x";
inline const char* const s3 = "f(f(x,y),f(u,v)) = f(f(x,u),f(y,v))";
inline const char* const s4 = "f(x,y) = f(y,x) -> x = y";

inline Theory s1_s4() {
  return parse_theory(std::string("sig f/2\n") + s1 + "\n" + s2 + "\n" + s3 + "\n" + s4 + "\n");
}

inline Theory theory(const std::string& body) { return parse_theory("sig f/2\n" + body); }

inline Term term(const std::string& s, const Signature& sig = binary()) { return parse_term(s, sig); }
inline Equation eq(const std::string& s, const Signature& sig = binary()) { return parse_equation(s, sig); }
inline QuasiIdentity qi(const std::string& s, const Signature& sig = binary()) {
  return parse_quasi_identity(s, sig);
}

inline Hypersubstitution hsub(const std::string& image, const Signature& sig = binary()) {
  return Hypersubstitution(sig, {parse_term(image, sig)});
}

}  // namespace fx
