#pragma once

#include <optional>
#include <string>
#include <vector>

namespace codirector {

// Raters x items grid of 5-point Likert ratings; missing entries allowed.
struct RatingsMatrix {
    std::vector<std::vector<std::optional<int>>> ratings;  // [rater][item]

    int rater_count() const { return static_cast<int>(ratings.size()); }
    int item_count() const { return ratings.empty() ? 0 : static_cast<int>(ratings[0].size()); }
    void validate() const;  // values in {1..5}, rectangular
};

enum class AlphaMetric { Nominal, Ordinal, Interval };

// Krippendorff's alpha over the full rater pool via coincidence matrices;
// handles missing ratings. Throws on degenerate input (expected disagreement
// zero, or fewer than 2 pairable items).
double krippendorff_alpha(const RatingsMatrix& m, AlphaMetric metric = AlphaMetric::Interval);

// Mean unweighted Cohen's kappa over all rater pairs, each computed on the
// pair's co-rated items. Pairs with chance agreement 1 contribute 0.
double pairwise_kappa(const RatingsMatrix& m);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
// Average-rank ties; equals pearson applied to ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
double mean_absolute_error(const std::vector<double>& x, const std::vector<double>& y);

// Maps an MLLM 0-100 score onto the 1-5 Likert scale.
double scale_to_likert(double score_0_100);

struct CorrelationSuite {
    double pearson = 0.0;
    double spearman = 0.0;
    double mae = 0.0;
};

// Judge scores on [0,100] are mapped to 1-5 before the MAE; correlations are
// scale-invariant. Throws on length mismatch or zero variance.
CorrelationSuite correlation_suite(const std::vector<double>& judge,
                                   const std::vector<double>& mos);

std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace codirector
