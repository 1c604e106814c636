#pragma once

#include "elsort/report.hpp"
#include "elsort/run_config.hpp"

namespace elsort {

/// The learned partition-and-concatenate sorter: train on a sample, scatter
/// records into monotone equi-depth partition fragments, sort each partition
/// in memory, write it at its precomputed output offset. No merge phase.
RunReport elsar_sort(const RunConfig& config);

/// Dispatches on config.algorithm. Resolves machine-dependent defaults first.
RunReport run_sort(RunConfig config);

} // namespace elsort
