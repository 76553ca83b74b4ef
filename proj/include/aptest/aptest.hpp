#pragma once

#include "aptest/cluster_tester.hpp"
#include "aptest/decision_tree.hpp"
#include "aptest/dimension.hpp"
#include "aptest/disjoint_union.hpp"
#include "aptest/distribution.hpp"
#include "aptest/errors.hpp"
#include "aptest/experiment.hpp"
#include "aptest/gaussian_bounds.hpp"
#include "aptest/generators.hpp"
#include "aptest/hermite.hpp"
#include "aptest/interval_distance.hpp"
#include "aptest/interval_tester.hpp"
#include "aptest/io.hpp"
#include "aptest/label_law.hpp"
#include "aptest/local_tester.hpp"
#include "aptest/ltf.hpp"
#include "aptest/ltf_tester.hpp"
#include "aptest/margin.hpp"
#include "aptest/noise_sensitivity.hpp"
#include "aptest/oracle.hpp"
#include "aptest/piecewise.hpp"
#include "aptest/prior.hpp"
#include "aptest/rng.hpp"
#include "aptest/self_correct.hpp"
#include "aptest/stats.hpp"
#include "aptest/ustat.hpp"
