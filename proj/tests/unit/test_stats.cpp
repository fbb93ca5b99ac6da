#include "gazeflow/error.hpp"
#include "gazeflow/random.hpp"
#include "gazeflow/stats.hpp"

#include "oracles.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gazeflow;

namespace {

std::vector<double> with_ties(Rng& rng, std::size_t n)
{
    std::vector<double> v(n);
    for (auto& x : v)
        x = rng.bernoulli(0.3) ? std::floor(rng.uniform(0, 5)) : rng.normal(0, 3);
    return v;
}

} // namespace

TEST_CASE("fractional ranks")
{
    const std::vector<double> v{10, 20, 20, 5, 20};
    CHECK(fractional_ranks(v) == std::vector<double>{2, 4, 4, 1, 4});
}

TEST_CASE("spearman: identity, reversal, monotone maps")
{
    std::vector<double> x(30);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(static_cast<double>(i) * 1.7) * 100;
    std::vector<double> neg(x.size());
    std::vector<double> cube(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        neg[i] = -x[i];
        cube[i] = x[i] * x[i] * x[i] + 5;
    }
    CHECK(spearman(x, x).rho == 1.0);
    CHECK(spearman(x, neg).rho == -1.0);
    CHECK(spearman(x, cube).rho == 1.0);
}

TEST_CASE("spearman against the rank-then-Pearson oracle")
{
    Rng rng(1);
    for (int round = 0; round < 100; ++round) {
        const auto x = with_ties(rng, 50);
        const auto y = with_ties(rng, 50);
        const auto r = spearman(x, y);
        REQUIRE(r.rho);
        CHECK(std::abs(*r.rho - oracle::spearman(x, y)) <= 1e-12);
        CHECK(std::abs(*r.rho - *spearman(y, x).rho) <= 1e-12);
        CHECK(*r.rho >= -1.0);
        CHECK(*r.rho <= 1.0);
    }
}

TEST_CASE("spearman drops incomplete pairs and needs three")
{
    using O = std::optional<double>;
    const std::vector<O> x{1, 2, {}, 4, 5};
    const std::vector<O> y{2, {}, 7, 8, 9};
    const auto r = spearman(x, y);
    CHECK(r.pairs_used == 3);
    CHECK(r.rho == 1.0);

    const std::vector<O> short_x{1, {}, 3};
    const std::vector<O> short_y{1, 2, 3};
    const auto u = spearman(short_x, short_y);
    CHECK_FALSE(u.rho);
    CHECK_FALSE(u.diagnostic.empty());

    const std::vector<double> flat{1, 1, 1, 1};
    const std::vector<double> any{1, 2, 3, 4};
    CHECK_FALSE(spearman(flat, any).rho);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), InputError);
}

TEST_CASE("incomplete beta against Boost")
{
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const double a = std::exp(rng.uniform(-2, 6));
        const double b = std::exp(rng.uniform(-2, 6));
        const double x = rng.uniform();
        const double want = boost::math::ibeta(a, b, x);
        CHECK(regularized_incomplete_beta(x, a, b) == doctest::Approx(want).epsilon(1e-10).scale(1));
    }
    CHECK(regularized_incomplete_beta(0, 2, 3) == 0);
    CHECK(regularized_incomplete_beta(1, 2, 3) == 1);
}

TEST_CASE("t p-values against Boost")
{
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double df = std::floor(rng.uniform(1, 400));
        const double t = rng.normal(0, 4);
        const boost::math::students_t dist(df);
        const double want = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
        CHECK(student_t_two_sided_p(t, df) == doctest::Approx(want).epsilon(1e-10).scale(1));
    }
    CHECK(student_t_two_sided_p(0, 10) == 1.0);
    CHECK(student_t_two_sided_p(INFINITY, 10) == 0.0);
}

TEST_CASE("t-test: four-element textbook case")
{
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{3, 4, 5, 6};
    const auto r = independent_t_test(a, b);
    // pooled variance 5/3, se = sqrt(5/3 * 1/2), t = -2 / 0.9129 = -2.19089
    CHECK(r.t == doctest::Approx(-2.0 / std::sqrt(5.0 / 6.0)));
    CHECK(r.t == doctest::Approx(oracle::pooled_t(a, b)));
    CHECK(r.df == 6);
    CHECK(r.mean1 == 2.5);
    CHECK(r.mean2 == 4.5);
    const boost::math::students_t dist(6);
    CHECK(r.p == doctest::Approx(2 * boost::math::cdf(dist, r.t)).epsilon(1e-12));
}

TEST_CASE("t-test: identical groups and degenerate variance")
{
    const std::vector<double> a{3, 1, 4, 1, 5};
    const auto r = independent_t_test(a, a);
    CHECK(r.t == 0);
    CHECK(std::abs(r.p - 1.0) <= 1e-9);

    const std::vector<double> c1{2, 2, 2};
    const std::vector<double> c2{2, 2};
    CHECK(independent_t_test(c1, c2).p == 1.0);
    const std::vector<double> c3{5, 5, 5};
    const auto d = independent_t_test(c1, c3);
    CHECK(d.p == 0.0);
    CHECK(d.degenerate);
    CHECK_THROWS_AS(independent_t_test(std::vector<double>{1}, c1), InputError);
    CHECK_THROWS_AS(independent_t_test(std::vector<double>{1, NAN}, c1), InputError);
}

TEST_CASE("t-test invariances and Welch")
{
    Rng rng(4);
    for (int round = 0; round < 100; ++round) {
        std::vector<double> a(2 + rng.below(30));
        std::vector<double> b(2 + rng.below(30));
        for (auto& x : a)
            x = rng.normal(0, 1);
        for (auto& x : b)
            x = rng.normal(0.5, 2);
        const auto ab = independent_t_test(a, b);
        const auto ba = independent_t_test(b, a);
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
        CHECK(ab.t == doctest::Approx(-ba.t));
        auto a2 = a;
        auto b2 = b;
        for (auto& x : a2)
            x += 17;
        for (auto& x : b2)
            x += 17;
        CHECK(independent_t_test(a2, b2).p == doctest::Approx(ab.p).epsilon(1e-8));
        CHECK(ab.p >= 0);
        CHECK(ab.p <= 1);

        const auto w = independent_t_test(a, b, VarianceModel::welch);
        const double va = [&] { double m = 0, s = 0; for (double x : a) m += x; m /= a.size(); for (double x : a) s += (x - m) * (x - m); return s / (a.size() - 1); }();
        const double vb = [&] { double m = 0, s = 0; for (double x : b) m += x; m /= b.size(); for (double x : b) s += (x - m) * (x - m); return s / (b.size() - 1); }();
        const double na = static_cast<double>(a.size());
        const double nb = static_cast<double>(b.size());
        const double se2 = va / na + vb / nb;
        const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
        CHECK(w.df == doctest::Approx(df));
        CHECK(w.t == doctest::Approx((w.mean1 - w.mean2) / std::sqrt(se2)));
    }
}

TEST_CASE("moments and quartiles")
{
    const std::vector<double> one{42};
    CHECK(moments(one).mean == 42);
    CHECK(moments(one).std == 0);
    const std::vector<double> ages{30, 40};
    CHECK(moments(ages).mean == 35);
    CHECK(moments(ages).std == doctest::Approx(std::sqrt(50.0)));

    // Known construction: mean 10, sample std 2 exactly.
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) {
        v.push_back(10 + 2 * std::sqrt(99.0 / 100.0));
        v.push_back(10 - 2 * std::sqrt(99.0 / 100.0));
    }
    CHECK(std::abs(moments(v).mean - 10) <= 1e-9);
    CHECK(std::abs(moments(v).std - 2) <= 1e-9);

    const std::vector<double> q{7, 1, 3, 5};
    const auto qs = quartiles(q);
    CHECK(qs.min == 1);
    CHECK(qs.q1 == 2.5);
    CHECK(qs.median == 4);
    CHECK(qs.q3 == 5.5);
    CHECK(qs.max == 7);
    CHECK_THROWS_AS(quartiles(std::vector<double>{}), InputError);
}

TEST_CASE("cohort summary groups by language and skips missing values")
{
    std::vector<ParticipantRecord> ps(3);
    ps[0].participant_id = "a";
    ps[0].language = "en";
    ps[0].age = 30;
    ps[0].validation_accuracy_pct = 60;
    ps[1].participant_id = "b";
    ps[1].language = "en";
    ps[1].age = 40;
    ps[1].reported_sample_rate_hz = 20;
    ps[2].participant_id = "c";
    ps[2].language = "de";
    ps[2].reported_sample_rate_hz = 30;
    ps[2].total_experiment_ms = 1000;
    const auto s = cohort_summary(ps);
    CHECK(s.age.n == 2);
    CHECK(s.age.mean == 35);
    CHECK(s.sample_rate_hz.mean == 25);
    CHECK(s.by_language.at("en").participants == 2);
    CHECK(s.by_language.at("en").accuracy_pct->median == 60);
    CHECK_FALSE(s.by_language.at("en").total_time_ms);
    CHECK(s.by_language.at("de").total_time_ms->max == 1000);

    std::ostringstream os;
    write_cohort_summary(os, s);
    CHECK_FALSE(os.str().empty());
}

namespace {

std::vector<WordFeatureRow> dataset(Rng& rng, int readers, int texts, int words, double scale = 1.0)
{
    std::vector<WordFeatureRow> rows;
    for (int p = 0; p < readers; ++p)
        for (int t = 0; t < texts; ++t) {
            std::vector<WordFeatures> w(static_cast<std::size_t>(words));
            for (int i = 0; i < words; ++i) {
                w[i].token_index = i;
                const bool fixated = rng.bernoulli(0.8);
                w[i].trt_ms = fixated ? scale * (100 + 20 * i + rng.uniform(0, 50)) : 0;
                w[i].nfix = fixated ? 1 + rng.below(3) : 0;
            }
            relative_fixation(w);
            for (const auto& x : w)
                rows.push_back({"p" + std::to_string(p), "t" + std::to_string(t), x});
        }
    return rows;
}

} // namespace

TEST_CASE("compare_datasets: self comparison and scaling")
{
    Rng rng(5);
    const auto a = dataset(rng, 5, 3, 30);
    const auto self = compare_datasets(a, a, {{"t0", "en"}, {"t1", "en"}, {"t2", "de"}});
    REQUIRE(self.size() == 3);
    CHECK(self[0].language == "de");
    for (const auto& r : self) {
        CHECK(r.rho == 1.0);
        CHECK(r.trt_a == r.trt_b);
        CHECK(r.nfix_a == r.nfix_b);
    }

    auto doubled = a;
    for (auto& r : doubled) {
        r.word.trt_ms *= 2;
    }
    for (const auto& r : compare_datasets(a, doubled)) {
        CHECK(r.rho == 1.0);
        CHECK(*r.trt_b == doctest::Approx(2 * *r.trt_a));
    }
}

TEST_CASE("compare_datasets: independent readers of the same texts correlate")
{
    Rng rng(6);
    const auto a = dataset(rng, 20, 2, 40);
    const auto b = dataset(rng, 20, 2, 40);
    for (const auto& r : compare_datasets(a, b))
        CHECK(*r.rho > 0.8);
}

TEST_CASE("compare_datasets: token mismatch is an alignment error")
{
    Rng rng(7);
    const auto a = dataset(rng, 2, 1, 10);
    auto b = dataset(rng, 2, 1, 10);
    std::erase_if(b, [](const auto& row) { return row.word.token_index == 9; });
    CHECK_THROWS_WITH_AS(compare_datasets(a, b), doctest::Contains("alignment"), InputError);
}

TEST_CASE("comparison table round trip")
{
    std::vector<ComparisonRow> rows(2);
    rows[0] = {"en", "t1", 210.5, 230.25, 1.5, 1.75, 0.625, 38};
    rows[1] = {"", "t2", {}, 100, 0, 2, {}, 0};
    std::ostringstream os;
    write_comparison(os, rows);
    const auto back = parse_comparison(os.str());
    REQUIRE(back.size() == 2);
    CHECK(back[0].language == "en");
    CHECK(back[0].rho == 0.625);
    CHECK(back[0].words_correlated == 38);
    CHECK_FALSE(back[1].trt_a);
    CHECK_FALSE(back[1].rho);
}

TEST_CASE("feature t-tests cover f1..f7 and skip undefined ratios per feature")
{
    Rng rng(8);
    std::vector<TrialFeatures> trials;
    for (int i = 0; i < 40; ++i) {
        TrialFeatures f;
        f.task = i % 4 == 0 ? Task::NR : Task::IS;
        f.label = i % 2 == 0;
        f.f1_fix_on_target = rng.uniform(0, 20);
        f.f2_total_fixations = 30 + rng.uniform(0, 20);
        f.f3_target_total_ratio = f.f1_fix_on_target / f.f2_total_fixations;
        f.f4_trt_text_ms = rng.uniform(5000, 9000);
        f.f5_trt_target_ms = rng.uniform(0, 2000);
        if (i != 3)
            f.f6_trt_target_text_ratio = f.f5_trt_target_ms / f.f4_trt_text_ms;
        f.f7_trial_time_ms = rng.uniform(9000, 12000);
        f.avg_word_trt_out_target_ms = 100;
        trials.push_back(f);
    }
    const auto r = feature_t_tests(trials, Task::IS);
    REQUIRE(r.size() == 7);
    CHECK(r[0].feature == "f1_fix_on_target");
    CHECK(r[6].feature == "f7_trial_time");
    CHECK(r[0].n1 + r[0].n2 == 30);
    CHECK(r[5].n1 + r[5].n2 == 29);
    std::ostringstream os;
    write_t_tests(os, Task::IS, r);
    CHECK(os.str().rfind("task,feature,n1,n2,mean1,mean2,t,df,p\nIS,f1_fix_on_target,", 0) == 0);
}
