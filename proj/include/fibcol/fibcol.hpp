#pragma once

// Fibonacci-polynomial collocation for generalized pantograph equations
// with linear functional arguments.

#include "fibcol/basis.hpp"
#include "fibcol/expr.hpp"
#include "fibcol/problem.hpp"
#include "fibcol/assemble.hpp"
#include "fibcol/solve.hpp"
#include "fibcol/residual.hpp"
#include "fibcol/oracle.hpp"
#include "fibcol/bench.hpp"
