// Umbrella header.

#pragma once

#include "iwit/compatibility.hpp"
#include "iwit/curve.hpp"
#include "iwit/discrimination.hpp"
#include "iwit/ensemble.hpp"
#include "iwit/errors.hpp"
#include "iwit/json_io.hpp"
#include "iwit/mub.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"
#include "iwit/witness.hpp"
