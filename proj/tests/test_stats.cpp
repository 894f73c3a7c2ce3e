#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "codirector/errors.hpp"
#include "codirector/stats.hpp"

using namespace codirector;

namespace {

RatingsMatrix matrix(std::vector<std::vector<int>> rows) {
    RatingsMatrix m;
    for (const auto& row : rows) {
        std::vector<std::optional<int>> cells;
        for (int v : row) {
            if (v == 0) {
                cells.push_back(std::nullopt);  // 0 encodes a missing rating
            } else {
                cells.push_back(v);
            }
        }
        m.ratings.push_back(std::move(cells));
    }
    return m;
}

// Brute-force alpha oracle: enumerates value pairs per unit directly instead
// of building a coincidence matrix, and derives the expected disagreement
// from the pooled value list.
double alpha_oracle(const RatingsMatrix& m, AlphaMetric metric) {
    std::vector<std::vector<int>> units;
    std::vector<int> pooled;
    for (int item = 0; item < m.item_count(); ++item) {
        std::vector<int> values;
        for (int rater = 0; rater < m.rater_count(); ++rater) {
            if (m.ratings[rater][item]) values.push_back(*m.ratings[rater][item]);
        }
        if (values.size() < 2) continue;
        for (int v : values) pooled.push_back(v);
        units.push_back(std::move(values));
    }
    if (units.size() < 2) throw ValidationError("degenerate: too few pairable items");
    const double n = static_cast<double>(pooled.size());

    std::map<int, double> marginal;
    for (int v : pooled) marginal[v] += 1.0;

    auto delta = [&](int c, int k) -> double {
        if (c == k) return 0.0;
        switch (metric) {
            case AlphaMetric::Nominal: return 1.0;
            case AlphaMetric::Interval: return double(c - k) * double(c - k);
            case AlphaMetric::Ordinal: {
                const int lo = std::min(c, k), hi = std::max(c, k);
                double cum = 0.0;
                for (int g = lo; g <= hi; ++g) cum += marginal[g];
                cum -= (marginal[lo] + marginal[hi]) / 2.0;
                return cum * cum;
            }
        }
        return 0.0;
    };

    double observed = 0.0;
    for (const auto& values : units) {
        const double mu = static_cast<double>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (std::size_t j = 0; j < values.size(); ++j) {
                if (i != j) observed += delta(values[i], values[j]) / (mu - 1.0);
            }
        }
    }
    double expected = 0.0;
    for (std::size_t p = 0; p < pooled.size(); ++p) {
        for (std::size_t q = 0; q < pooled.size(); ++q) {
            if (p != q) expected += delta(pooled[p], pooled[q]);
        }
    }
    expected /= (n - 1.0);
    if (expected <= 0.0) throw ValidationError("degenerate: zero expected disagreement");
    return 1.0 - observed / expected;
}

// Brute-force kappa oracle using maps instead of fixed confusion arrays.
double kappa_oracle(const RatingsMatrix& m) {
    double total = 0.0;
    int pairs = 0;
    for (int a = 0; a < m.rater_count(); ++a) {
        for (int b = a + 1; b < m.rater_count(); ++b) {
            std::vector<std::pair<int, int>> rated;
            for (int item = 0; item < m.item_count(); ++item) {
                if (m.ratings[a][item] && m.ratings[b][item]) {
                    rated.emplace_back(*m.ratings[a][item], *m.ratings[b][item]);
                }
            }
            if (rated.empty()) continue;
            const double n = static_cast<double>(rated.size());
            std::map<int, double> row, col;
            double agree = 0.0;
            for (const auto& [ra, rb] : rated) {
                if (ra == rb) agree += 1.0;
                row[ra] += 1.0;
                col[rb] += 1.0;
            }
            const double po = agree / n;
            double pe = 0.0;
            for (const auto& [v, count] : row) {
                if (col.count(v)) pe += (count / n) * (col[v] / n);
            }
            total += std::abs(1.0 - pe) < 1e-12 ? 0.0 : (po - pe) / (1.0 - pe);
            ++pairs;
        }
    }
    if (pairs == 0) throw ValidationError("degenerate: no overlapping pair");
    return total / pairs;
}

}  // namespace

TEST_CASE("alpha is 1 for unanimous raters across varying items") {
    const RatingsMatrix m = matrix({{1, 3, 5, 2}, {1, 3, 5, 2}, {1, 3, 5, 2}});
    for (AlphaMetric metric :
         {AlphaMetric::Nominal, AlphaMetric::Interval, AlphaMetric::Ordinal}) {
        CHECK(krippendorff_alpha(m, metric) == doctest::Approx(1.0));
    }
}

TEST_CASE("alpha is undefined when every rating is identical") {
    const RatingsMatrix m = matrix({{3, 3, 3}, {3, 3, 3}});
    CHECK_THROWS_AS(krippendorff_alpha(m), ValidationError);
}

TEST_CASE("alpha needs at least two pairable items") {
    CHECK_THROWS_AS(krippendorff_alpha(matrix({{1, 0, 0}, {2, 0, 0}})), ValidationError);
    CHECK_THROWS_AS(krippendorff_alpha(matrix({{1, 2}, {0, 0}})), ValidationError);
    CHECK_THROWS_AS(krippendorff_alpha(matrix({{1, 6}, {1, 6}})), ValidationError);
}

TEST_CASE("interval alpha on a maximal-disagreement 2x2 matrix") {
    // two raters, two items, values ((1,5),(5,1)): perfect systematic
    // disagreement. Hand computation: D_o = 16, D_e = (1/3)*(2*16) ... check
    // against the pair-enumeration oracle rather than a copied constant.
    const RatingsMatrix m = matrix({{1, 5}, {5, 1}});
    const double a = krippendorff_alpha(m, AlphaMetric::Interval);
    CHECK(a == doctest::Approx(alpha_oracle(m, AlphaMetric::Interval)));
    CHECK(a < 0.0);  // worse than chance
}

TEST_CASE("alpha agrees with the brute-force oracle on random matrices") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> raters(2, 5), items(3, 10), rating(1, 5);
    std::uniform_real_distribution<double> missing(0.0, 1.0);
    int checked = 0;
    while (checked < 50) {
        RatingsMatrix m;
        const int r = raters(rng), it = items(rng);
        for (int a = 0; a < r; ++a) {
            std::vector<std::optional<int>> row;
            for (int i = 0; i < it; ++i) {
                if (missing(rng) < 0.2) {
                    row.push_back(std::nullopt);
                } else {
                    row.push_back(rating(rng));
                }
            }
            m.ratings.push_back(std::move(row));
        }
        for (AlphaMetric metric :
             {AlphaMetric::Nominal, AlphaMetric::Interval, AlphaMetric::Ordinal}) {
            double expected;
            try {
                expected = alpha_oracle(m, metric);
            } catch (...) {
                CHECK_THROWS_AS(krippendorff_alpha(m, metric), ValidationError);
                continue;
            }
            CHECK(krippendorff_alpha(m, metric) == doctest::Approx(expected).epsilon(1e-9));
        }
        ++checked;
    }
}

TEST_CASE("alpha is invariant to rater order and item order") {
    const RatingsMatrix m = matrix({{1, 2, 3, 4, 5}, {2, 2, 3, 5, 4}, {1, 3, 3, 4, 4}});
    const RatingsMatrix raters_swapped =
        matrix({{1, 3, 3, 4, 4}, {1, 2, 3, 4, 5}, {2, 2, 3, 5, 4}});
    const RatingsMatrix items_swapped =
        matrix({{5, 4, 3, 2, 1}, {4, 5, 3, 2, 2}, {4, 4, 3, 3, 1}});
    for (AlphaMetric metric :
         {AlphaMetric::Nominal, AlphaMetric::Interval, AlphaMetric::Ordinal}) {
        const double base = krippendorff_alpha(m, metric);
        CHECK(krippendorff_alpha(raters_swapped, metric) == doctest::Approx(base));
        CHECK(krippendorff_alpha(items_swapped, metric) == doctest::Approx(base));
    }
}

TEST_CASE("kappa: identical raters score 1, an uninformative rater scores 0") {
    CHECK(pairwise_kappa(matrix({{1, 2, 3, 4}, {1, 2, 3, 4}})) == doctest::Approx(1.0));
    // one rater always answers 3: chance agreement equals observed agreement
    CHECK(pairwise_kappa(matrix({{3, 3, 3, 3}, {1, 3, 2, 3}})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(pairwise_kappa(matrix({{1, 0}, {0, 2}})), ValidationError);
}

TEST_CASE("kappa agrees with the brute-force oracle on random matrices") {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> raters(2, 5), items(2, 12), rating(1, 5);
    std::uniform_real_distribution<double> missing(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        RatingsMatrix m;
        const int r = raters(rng), it = items(rng);
        for (int a = 0; a < r; ++a) {
            std::vector<std::optional<int>> row;
            for (int i = 0; i < it; ++i) {
                if (missing(rng) < 0.15) {
                    row.push_back(std::nullopt);
                } else {
                    row.push_back(rating(rng));
                }
            }
            m.ratings.push_back(std::move(row));
        }
        bool pair_exists = false;
        for (int a = 0; a < r && !pair_exists; ++a) {
            for (int b = a + 1; b < r && !pair_exists; ++b) {
                for (int i = 0; i < it; ++i) {
                    if (m.ratings[a][i] && m.ratings[b][i]) {
                        pair_exists = true;
                        break;
                    }
                }
            }
        }
        if (!pair_exists) {
            CHECK_THROWS_AS(pairwise_kappa(m), ValidationError);
            continue;
        }
        CHECK(pairwise_kappa(m) == doctest::Approx(kappa_oracle(m)).epsilon(1e-9));
    }
}

TEST_CASE("pearson basics and zero-variance rejection") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(pearson({}, {}), ValidationError);
}

TEST_CASE("average ranks handle ties by the midrank convention") {
    CHECK(average_ranks({10, 20, 20, 30}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(average_ranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
}

TEST_CASE("spearman equals pearson applied to midranks") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 12; ++i) {
            // coarse quantization forces ties
            x.push_back(std::floor(value(rng)));
            y.push_back(std::floor(value(rng)));
        }
        double expected;
        try {
            expected = pearson(average_ranks(x), average_ranks(y));
        } catch (const ValidationError&) {
            CHECK_THROWS_AS(spearman(x, y), ValidationError);
            continue;
        }
        CHECK(spearman(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
    // monotone transforms leave spearman untouched
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {2, 1, 5, 3, 4};
    std::vector<double> cubed;
    for (double v : x) cubed.push_back(v * v * v);
    CHECK(spearman(cubed, y) == doctest::Approx(spearman(x, y)));
}

TEST_CASE("mean absolute error") {
    CHECK(mean_absolute_error({1, 2, 3}, {2, 2, 2}) == doctest::Approx(2.0 / 3.0));
    CHECK(mean_absolute_error({4, 4}, {4, 4}) == doctest::Approx(0.0));
}

TEST_CASE("likert rescale maps the 0-100 range onto 1-5") {
    CHECK(scale_to_likert(0.0) == doctest::Approx(1.0));
    CHECK(scale_to_likert(50.0) == doctest::Approx(3.0));
    CHECK(scale_to_likert(100.0) == doctest::Approx(5.0));
}

TEST_CASE("correlation suite rescales the judge only for the MAE") {
    // judge scores on 0-100 that rescale exactly onto the MOS values
    const std::vector<double> judge = {0.0, 25.0, 50.0, 75.0, 100.0};
    const std::vector<double> mos = {1.0, 2.0, 3.0, 4.0, 5.0};
    const CorrelationSuite suite = correlation_suite(judge, mos);
    CHECK(suite.pearson == doctest::Approx(1.0));
    CHECK(suite.spearman == doctest::Approx(1.0));
    CHECK(suite.mae == doctest::Approx(0.0));

    const CorrelationSuite anti = correlation_suite({100, 75, 50, 25, 0}, mos);
    CHECK(anti.pearson == doctest::Approx(-1.0));
    CHECK(anti.spearman == doctest::Approx(-1.0));
    CHECK(anti.mae == doctest::Approx((4 + 2 + 0 + 2 + 4) / 5.0));

    CHECK_THROWS_AS(correlation_suite({50, 50, 50}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(correlation_suite({50}, {1, 2}), ValidationError);
}
