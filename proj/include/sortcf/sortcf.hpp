#pragma once

// Umbrella header: contingency tables, the LL sorting indicator, the two
// counterfactual engines, and the decomposition pipelines.

#include "sortcf/csv.hpp"
#include "sortcf/decompose.hpp"
#include "sortcf/error.hpp"
#include "sortcf/ipf.hpp"
#include "sortcf/ll.hpp"
#include "sortcf/nm.hpp"
#include "sortcf/table.hpp"
