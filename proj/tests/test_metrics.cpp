#include "dwid/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dwid;
using namespace dwid::metrics;

namespace {

std::vector<Label> to_labels(const std::vector<int>& v) {
    std::vector<Label> out;
    for (int x : v) out.push_back(x ? Label::corrupt : Label::clean);
    return out;
}

// Mann-Whitney estimate of the AUC: P(score_pos > score_neg) + 0.5 P(tie).
double pairwise_auc(const std::vector<double>& p, const std::vector<Label>& l) {
    double wins = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            if (l[i] == Label::corrupt && l[j] == Label::clean) {
                ++pairs;
                wins += p[i] > p[j] ? 1.0 : (p[i] == p[j] ? 0.5 : 0.0);
            }
    return wins / pairs;
}

} // namespace

TEST_CASE("separated scores") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.7, 0.8};
    const auto l = to_labels({0, 0, 0, 1, 1});
    const RocCurve roc = roc_curve(p, l);
    CHECK(roc.positives == 2);
    CHECK(roc.negatives == 3);
    CHECK(auc(roc) == 1.0);
    const double t = select_threshold(roc);
    CHECK(t > 0.3);
    CHECK(t <= 0.7);
    CHECK(std::isinf(roc.points.front().threshold));
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
}

TEST_CASE("identical scores") {
    const RocCurve roc = roc_curve({0.4, 0.4, 0.4}, to_labels({0, 1, 0}));
    CHECK(select_threshold(roc) == 0.4);
    CHECK(auc(roc) == 0.5);
}

TEST_CASE("single class") {
    const RocCurve roc = roc_curve({0.1, 0.9}, to_labels({1, 1}));
    CHECK_FALSE(roc.points.empty());
    CHECK_THROWS_AS(auc(roc), Error);
    CHECK_THROWS_AS(roc_curve({}, {}), Error);
    CHECK_THROWS_AS(roc_curve({0.1}, to_labels({1, 0})), Error);
    CHECK_THROWS_AS(roc_curve({0.1}, {Label::unknown}), Error);
    CHECK_THROWS_AS(roc_curve({1.5}, to_labels({1})), Error);
}

TEST_CASE("auc agrees with the pairwise estimate and is rank-based") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p;
        std::vector<Label> l;
        for (int k = 0; k < 40; ++k) {
            const bool pos = rng() % 3 == 0;
            // Coarse grid forces ties.
            p.push_back(std::round((u(rng) + (pos ? 0.3 : 0.0)) * 10.0) / 13.0);
            l.push_back(pos ? Label::corrupt : Label::clean);
        }
        l[0] = Label::corrupt;
        l[1] = Label::clean;
        const double a = auc(roc_curve(p, l));
        REQUIRE(a == doctest::Approx(pairwise_auc(p, l)).epsilon(1e-12));

        std::vector<double> q;
        for (double v : p) q.push_back(std::pow(v, 3.0) * 0.5 + 0.1);
        REQUIRE(auc(roc_curve(q, l)) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("roc is a monotone staircase") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p;
    std::vector<Label> l;
    for (int k = 0; k < 200; ++k) {
        p.push_back(u(rng));
        l.push_back(rng() % 2 ? Label::corrupt : Label::clean);
    }
    const RocCurve roc = roc_curve(p, l);
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
        CHECK(roc.points[k].fpr >= roc.points[k - 1].fpr);
        CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
        CHECK(roc.points[k].threshold < roc.points[k - 1].threshold);
    }
}

TEST_CASE("uninformative scores give an auc near one half") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p;
    std::vector<Label> l;
    for (int k = 0; k < 20000; ++k) {
        p.push_back(u(rng));
        l.push_back(rng() % 2 ? Label::corrupt : Label::clean);
    }
    CHECK(std::abs(auc(roc_curve(p, l)) - 0.5) < 0.05);
}

TEST_CASE("threshold ties go to fewer positives") {
    // Thresholds 0.9 and 0.3 both give TPR - FPR = 0.5.
    const std::vector<double> p{0.9, 0.6, 0.3, 0.1};
    const auto l = to_labels({1, 0, 1, 0});
    const RocCurve roc = roc_curve(p, l);
    CHECK(select_threshold(roc) == 0.9);
}

TEST_CASE("classification scores") {
    const auto l = to_labels({1, 0, 1, 0});
    const auto perfect = classification_scores({true, false, true, false}, l);
    CHECK(perfect.accuracy == 1.0);
    CHECK(*perfect.sensitivity == 1.0);
    CHECK(*perfect.specificity == 1.0);
    CHECK(*perfect.precision == 1.0);

    const auto none = classification_scores({false, false, false, false}, l);
    CHECK_FALSE(none.precision.has_value());
    CHECK(*none.sensitivity == 0.0);

    CHECK_FALSE(classification_scores({true}, to_labels({1})).specificity.has_value());
    CHECK_THROWS_AS(classification_scores({true}, l), Error);

    // TP 8, FN 2, FP 11, TN 52.
    std::vector<bool> pred;
    std::vector<Label> truth;
    auto add = [&](int count, bool p, int t) {
        for (int k = 0; k < count; ++k) {
            pred.push_back(p);
            truth.push_back(t ? Label::corrupt : Label::clean);
        }
    };
    add(8, true, 1);
    add(2, false, 1);
    add(11, true, 0);
    add(52, false, 0);
    const auto s = classification_scores(pred, truth);
    CHECK(std::round(s.accuracy * 100) / 100 == doctest::Approx(0.82));
    CHECK(std::round(*s.sensitivity * 100) / 100 == doctest::Approx(0.80));
    CHECK(std::round(*s.specificity * 100) / 100 == doctest::Approx(0.83));
    CHECK(std::round(*s.precision * 100) / 100 == doctest::Approx(0.42));
}

TEST_CASE("bin convention") {
    CHECK(bin_index(0.0) == 0);
    CHECK(bin_index(9.999) == 0);
    CHECK(bin_index(10.0) == 1);
    CHECK(bin_index(50.0) == 5);
    CHECK(bin_index(100.0) == 9);
    CHECK_THROWS_AS(bin_index(-0.5), Error);
    CHECK_THROWS_AS(bin_index(100.5), Error);
}

TEST_CASE("binned analysis") {
    const auto one = binned_analysis({{45.0, "uniform", 3.5}});
    REQUIRE(one.size() == 1);
    CHECK(one[0].bin_low == 40.0);
    CHECK(one[0].bin_high == 50.0);
    CHECK(one[0].mean == 3.5);
    CHECK(one[0].std == 0.0);
    CHECK(one[0].n == 1);

    const auto rows = binned_analysis({{50.0, "cd", 1.0}, {55.0, "cd", 3.0}, {50.0, "awa", 2.0}, {10.0, "cd", 7.0}});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].bin_low == 10.0);
    CHECK(rows[1].method == "cd");
    CHECK(rows[1].bin_low == 50.0);
    CHECK(rows[1].mean == 2.0);
    CHECK(rows[1].std == 1.0);
    CHECK(rows[2].method == "awa");

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<Record> recs;
    for (int k = 0; k < 1000; ++k) recs.push_back({k % 50 == 0 ? 100.0 : u(rng), k % 3 ? "a" : "b", u(rng)});
    int total = 0;
    for (const auto& r : binned_analysis(recs)) total += r.n;
    CHECK(total == 1000);

    const std::string csv = bins_to_csv(one);
    CHECK(csv.rfind("bin_low,bin_high,method,mean,std,n\n", 0) == 0);
    CHECK(csv.find("40,50,uniform,3.5,0,1") != std::string::npos);
}

TEST_CASE("roc csv") {
    const std::string csv = roc_to_csv(roc_curve({0.2, 0.8}, to_labels({0, 1})));
    CHECK(csv.rfind("fpr,tpr,threshold\n", 0) == 0);
    CHECK(csv.find("inf") != std::string::npos);
}
