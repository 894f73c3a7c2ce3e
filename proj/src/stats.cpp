#include "codirector/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "codirector/errors.hpp"

namespace codirector {

namespace {
constexpr int kCategories = 5;  // Likert 1..5
}

void RatingsMatrix::validate() const {
    const std::size_t items = ratings.empty() ? 0 : ratings[0].size();
    for (const auto& row : ratings) {
        if (row.size() != items) throw ValidationError("ratings matrix is not rectangular");
        for (const auto& cell : row) {
            if (cell && (*cell < 1 || *cell > kCategories)) {
                throw ValidationError("rating outside the 1..5 scale");
            }
        }
    }
}

double krippendorff_alpha(const RatingsMatrix& m, AlphaMetric metric) {
    m.validate();
    // coincidence matrix over the 5 categories
    std::array<std::array<double, kCategories + 1>, kCategories + 1> coincidence{};
    int pairable_items = 0;
    for (int item = 0; item < m.item_count(); ++item) {
        std::vector<int> values;
        for (int rater = 0; rater < m.rater_count(); ++rater) {
            if (m.ratings[rater][item]) values.push_back(*m.ratings[rater][item]);
        }
        const int mu = static_cast<int>(values.size());
        if (mu < 2) continue;
        ++pairable_items;
        for (int i = 0; i < mu; ++i) {
            for (int j = 0; j < mu; ++j) {
                if (i == j) continue;
                coincidence[values[i]][values[j]] += 1.0 / (mu - 1);
            }
        }
    }
    if (pairable_items < 2) {
        throw ValidationError("krippendorff alpha needs at least 2 items with 2+ ratings");
    }

    std::array<double, kCategories + 1> marginal{};
    double n = 0.0;
    for (int c = 1; c <= kCategories; ++c) {
        for (int k = 1; k <= kCategories; ++k) marginal[c] += coincidence[c][k];
        n += marginal[c];
    }

    auto delta = [&](int c, int k) -> double {
        if (c == k) return 0.0;
        switch (metric) {
            case AlphaMetric::Nominal: return 1.0;
            case AlphaMetric::Interval: return static_cast<double>((c - k) * (c - k));
            case AlphaMetric::Ordinal: {
                const int lo = std::min(c, k), hi = std::max(c, k);
                double cumulative = 0.0;
                for (int g = lo; g <= hi; ++g) cumulative += marginal[g];
                cumulative -= (marginal[lo] + marginal[hi]) / 2.0;
                return cumulative * cumulative;
            }
        }
        return 0.0;
    };

    double observed = 0.0, expected = 0.0;
    for (int c = 1; c <= kCategories; ++c) {
        for (int k = 1; k <= kCategories; ++k) {
            observed += coincidence[c][k] * delta(c, k);
            expected += marginal[c] * marginal[k] * delta(c, k);
        }
    }
    expected /= (n - 1.0);
    if (expected <= 0.0) {
        throw ValidationError("krippendorff alpha undefined: expected disagreement is zero");
    }
    return 1.0 - observed / expected;
}

double pairwise_kappa(const RatingsMatrix& m) {
    m.validate();
    double total = 0.0;
    int pairs = 0;
    for (int a = 0; a < m.rater_count(); ++a) {
        for (int b = a + 1; b < m.rater_count(); ++b) {
            std::array<std::array<double, kCategories + 1>, kCategories + 1> confusion{};
            int shared = 0;
            for (int item = 0; item < m.item_count(); ++item) {
                const auto& ra = m.ratings[a][item];
                const auto& rb = m.ratings[b][item];
                if (ra && rb) {
                    confusion[*ra][*rb] += 1.0;
                    ++shared;
                }
            }
            if (shared == 0) continue;
            double po = 0.0, pe = 0.0;
            for (int c = 1; c <= kCategories; ++c) {
                po += confusion[c][c] / shared;
                double row = 0.0, col = 0.0;
                for (int k = 1; k <= kCategories; ++k) {
                    row += confusion[c][k];
                    col += confusion[k][c];
                }
                pe += (row / shared) * (col / shared);
            }
            const double kappa = std::abs(1.0 - pe) < 1e-12 ? 0.0 : (po - pe) / (1.0 - pe);
            total += kappa;
            ++pairs;
        }
    }
    if (pairs == 0) throw ValidationError("no rater pair shares any rated item");
    return total / pairs;
}

namespace {
void require_same_nonzero(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("series length mismatch");
    if (x.empty()) throw ValidationError("empty series");
}
}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_nonzero(x, y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw ValidationError("correlation undefined: zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_nonzero(x, y);
    return pearson(average_ranks(x), average_ranks(y));
}

double mean_absolute_error(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_nonzero(x, y);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += std::abs(x[i] - y[i]);
    return total / static_cast<double>(x.size());
}

double scale_to_likert(double score_0_100) { return score_0_100 / 25.0 + 1.0; }

CorrelationSuite correlation_suite(const std::vector<double>& judge,
                                   const std::vector<double>& mos) {
    require_same_nonzero(judge, mos);
    std::vector<double> judge_likert(judge.size());
    std::transform(judge.begin(), judge.end(), judge_likert.begin(), scale_to_likert);
    CorrelationSuite suite;
    suite.pearson = pearson(judge, mos);
    suite.spearman = spearman(judge, mos);
    suite.mae = mean_absolute_error(judge_likert, mos);
    return suite;
}

}  // namespace codirector
