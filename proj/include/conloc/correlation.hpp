#pragma once

#include <optional>
#include <span>
#include <vector>

namespace conloc::stats {

// Sample Pearson product-moment coefficient. Undefined (nullopt) when n < 2
// or either margin has zero variance; never returns NaN.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

// Ranks 1..n with ties assigned the average of their rank range.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson on average ranks.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace conloc::stats
