#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsgd/aggregation.hpp"

namespace rsgd {

struct BenchRow {
  std::size_t dimension = 0;
  std::size_t chunks = 0;
  AggregatorKind aggregator = AggregatorKind::Medoid;
  std::size_t repetitions = 0;
  double median_seconds = 0.0;
};

/// Median wall time per call of medoid, elementwise_median and mean on random
/// Gaussian inputs. Rows are ordered by dimension, then M, then aggregator.
std::vector<BenchRow> bench_aggregators(const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& chunks,
                                        std::size_t repetitions, std::uint64_t seed = 0);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace rsgd
