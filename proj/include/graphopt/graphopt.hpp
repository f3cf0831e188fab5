#ifndef GRAPHOPT_GRAPHOPT_HPP
#define GRAPHOPT_GRAPHOPT_HPP

/* Umbrella header: the whole library. */

#include "graphopt/value.hpp"
#include "graphopt/graph.hpp"
#include "graphopt/jsonl.hpp"
#include "graphopt/generate.hpp"
#include "graphopt/backend.hpp"
#include "graphopt/ast.hpp"
#include "graphopt/parse.hpp"
#include "graphopt/classify.hpp"
#include "graphopt/table.hpp"
#include "graphopt/kv.hpp"
#include "graphopt/path.hpp"
#include "graphopt/schedule.hpp"
#include "graphopt/aggregate.hpp"
#include "graphopt/naive.hpp"
#include "graphopt/optimizer.hpp"
#include "graphopt/bench.hpp"

#endif
