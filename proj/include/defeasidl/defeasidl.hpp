#pragma once

#include "analysis.hpp"
#include "check.hpp"
#include "compiler.hpp"
#include "datalog.hpp"
#include "eval.hpp"
#include "mangle.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "random.hpp"
#include "theory.hpp"
#include "theory_parser.hpp"
#include "validate.hpp"
