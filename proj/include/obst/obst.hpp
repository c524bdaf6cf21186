#pragma once

#include "obst/bst.hpp"
#include "obst/cgm.hpp"
#include "obst/dp_tables.hpp"
#include "obst/dynamic_graph.hpp"
#include "obst/errors.hpp"
#include "obst/frequency_set.hpp"
#include "obst/io.hpp"
#include "obst/metrics.hpp"
#include "obst/partition.hpp"
#include "obst/schedule.hpp"
#include "obst/sequential.hpp"
#include "obst/weight_oracle.hpp"
