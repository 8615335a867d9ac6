#pragma once

#include "hyperq/syntax.hpp"
#include "hyperq/hypersubst.hpp"
#include "hyperq/algebra.hpp"
#include "hyperq/satisfaction.hpp"
#include "hyperq/solidity.hpp"
#include "hyperq/inference.hpp"
