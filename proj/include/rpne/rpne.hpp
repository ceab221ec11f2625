#pragma once

// Umbrella header for the library (the command-line layer lives in cli.hpp).

#include "rpne/backend.hpp"
#include "rpne/bench.hpp"
#include "rpne/case_table.hpp"
#include "rpne/config.hpp"
#include "rpne/engine.hpp"
#include "rpne/errors.hpp"
#include "rpne/fitness.hpp"
#include "rpne/genome.hpp"
#include "rpne/infix.hpp"
#include "rpne/interpreter.hpp"
#include "rpne/population.hpp"
#include "rpne/random.hpp"
#include "rpne/report.hpp"
#include "rpne/selection.hpp"
#include "rpne/token.hpp"
#include "rpne/validation.hpp"
#include "rpne/variation.hpp"
