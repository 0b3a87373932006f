#pragma once

#include "concord/consensus.hpp"
#include "concord/csv.hpp"
#include "concord/dqp_solver.hpp"
#include "concord/error.hpp"
#include "concord/estimatability.hpp"
#include "concord/evaluation.hpp"
#include "concord/multi_impute.hpp"
#include "concord/parallel.hpp"
#include "concord/qp_solver.hpp"
#include "concord/rating_matrix.hpp"
#include "concord/stats.hpp"
#include "concord/synthetic.hpp"
