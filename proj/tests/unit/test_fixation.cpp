#include "gazeflow/error.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/random.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gazeflow;

namespace {

Fixation fix_at(double x, double y, double t, double d, bool first = false)
{
    Fixation f;
    f.x = x;
    f.y = y;
    f.t = t;
    f.duration_ms = d;
    f.is_first = first;
    return f;
}

} // namespace

TEST_CASE("default parameters")
{
    const FixationParams p;
    CHECK(p.window_ms == 150.0);
    CHECK(p.radius_px == 32.0);
    CHECK(p.bounds_tolerance_px == 50.0);
    CHECK(p.min_fix_ms == 50.0);
    CHECK(p.timestamp == FixationTime::last_sample);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameters must be positive and finite")
{
    for (double bad : {0.0, -1.0, std::nan(""), static_cast<double>(INFINITY)}) {
        FixationParams p;
        p.radius_px = bad;
        CHECK_THROWS_AS(p.validate(), InputError);
        p = {};
        p.window_ms = bad;
        CHECK_THROWS_AS(p.validate(), InputError);
        p = {};
        p.min_fix_ms = bad;
        CHECK_THROWS_AS(p.validate(), InputError);
        p = {};
        p.bounds_tolerance_px = bad;
        CHECK_THROWS_AS(p.validate(), InputError);
    }
}

TEST_CASE("normalize subtracts the frame origin")
{
    const StimulusFrame origin0{0, 0, 1280, 720};
    const std::vector<GazeSample> s{{10, 500, 400}, {20, -3, 7}};
    CHECK(normalize(s, origin0) == s);

    const StimulusFrame f{100, 50, 1280, 720};
    const auto n = normalize(std::vector<GazeSample>{{10, 500, 400}}, f);
    CHECK(n[0] == GazeSample{10, 400, 350});
}

TEST_CASE("normalize inverts an origin shift")
{
    Rng rng(1);
    const StimulusFrame f{rng.uniform(0, 700), rng.uniform(0, 400), 1280, 720};
    std::vector<GazeSample> image(1000);
    std::vector<GazeSample> screen(1000);
    for (std::size_t i = 0; i < image.size(); ++i) {
        // Integer pixel values keep the shift exact.
        image[i] = {static_cast<double>(i), std::floor(rng.uniform(0, 1280)), std::floor(rng.uniform(0, 720))};
        screen[i] = {image[i].t, image[i].x + f.origin_x, image[i].y + f.origin_y};
    }
    const auto back = normalize(screen, f);
    for (std::size_t i = 0; i < image.size(); ++i) {
        CHECK(back[i].t == image[i].t);
        CHECK(back[i].x == doctest::Approx(image[i].x).epsilon(1e-12));
        CHECK(back[i].y == doctest::Approx(image[i].y).epsilon(1e-12));
    }
}

TEST_CASE("merge: single sample and the three-sample example")
{
    const FixationParams p;
    const auto one = merge_fixations(std::vector<GazeSample>{{5, 7, 9}}, p);
    REQUIRE(one.size() == 1);
    CHECK(one[0].merged_count == 1);
    CHECK(one[0].x == 7);
    CHECK(one[0].y == 9);
    CHECK(one[0].is_first);

    const auto two = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {40, 5, 0}, {80, 100, 0}}, p);
    REQUIRE(two.size() == 2);
    CHECK(two[0].x == 2.5);
    CHECK(two[0].y == 0);
    CHECK(two[0].merged_count == 2);
    CHECK(two[1].x == 100);
    CHECK(two[1].merged_count == 1);
    CHECK(two[0].is_first);
    CHECK_FALSE(two[1].is_first);
    CHECK(merge_fixations(std::vector<GazeSample>{}, p).empty());
}

TEST_CASE("merge: radius is strict, window is inclusive")
{
    FixationParams p;
    auto r = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {10, 32, 0}}, p);
    CHECK(r.size() == 2);
    r = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {10, 31.999, 0}}, p);
    CHECK(r.size() == 1);
    r = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {150, 0, 0}}, p);
    CHECK(r.size() == 1);
    r = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {150.001, 0, 0}}, p);
    CHECK(r.size() == 2);
}

TEST_CASE("merge: absorption stops at the first violating sample")
{
    const FixationParams p;
    // The third sample is back near the anchor but must open its own fixation.
    const auto r = merge_fixations(std::vector<GazeSample>{{0, 0, 0}, {40, 200, 0}, {80, 1, 0}}, p);
    REQUIRE(r.size() == 3);
    CHECK(r[2].merged_count == 1);
}

TEST_CASE("merge: timestamp source")
{
    FixationParams p;
    const std::vector<GazeSample> s{{100, 0, 0}, {140, 1, 0}, {180, 2, 0}};
    CHECK(merge_fixations(s, p)[0].t == 180);
    p.timestamp = FixationTime::anchor;
    CHECK(merge_fixations(s, p)[0].t == 100);
}

TEST_CASE("merge rejects unsorted input")
{
    CHECK_THROWS_AS(merge_fixations(std::vector<GazeSample>{{40, 0, 0}, {0, 0, 0}}, FixationParams{}),
                    InternalError);
}

TEST_CASE("merge equals the brute-force reference on random scanpaths")
{
    Rng rng(2024);
    for (int round = 0; round < 300; ++round) {
        FixationParams p;
        p.radius_px = rng.uniform(5.0, 80.0);
        p.window_ms = rng.uniform(30.0, 400.0);
        p.timestamp = rng.bernoulli(0.5) ? FixationTime::anchor : FixationTime::last_sample;
        const auto s = gen::scanpath(rng, rng.below(201));
        const auto got = merge_fixations(s, p);
        const auto want = oracle::merge(s, p.radius_px, p.window_ms, p.timestamp == FixationTime::anchor);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].merged_count == want[i].count);
            CHECK(std::abs(got[i].x - want[i].x) <= 1e-9);
            CHECK(std::abs(got[i].y - want[i].y) <= 1e-9);
            CHECK(got[i].t == want[i].t);
            CHECK(got[i].is_first == (i == 0));
        }
    }
}

TEST_CASE("merge properties: conservation and centroid locality")
{
    Rng rng(99);
    const FixationParams p;
    for (int round = 0; round < 300; ++round) {
        const auto s = gen::scanpath(rng, rng.below(201));
        const auto fx = merge_fixations(s, p);
        std::size_t total = 0;
        std::size_t start = 0;
        for (const auto& f : fx) {
            total += f.merged_count;
            const double dx = f.x - s[start].x;
            const double dy = f.y - s[start].y;
            CHECK(std::sqrt(dx * dx + dy * dy) <= p.radius_px);
            start += f.merged_count;
        }
        CHECK(total == s.size());
    }
}

TEST_CASE("merge: shrinking r or w never lengthens the run opened at any anchor")
{
    // The fixation count itself is not monotone (see the regression case
    // below); what shrinking does guarantee is that the contiguous run opened
    // by a given anchor can only get shorter.
    auto run_length = [](const std::vector<GazeSample>& s, std::size_t i, double r, double w) {
        std::size_t j = i + 1;
        while (j < s.size() && std::hypot(s[j].x - s[i].x, s[j].y - s[i].y) < r && s[j].t - s[i].t <= w)
            ++j;
        return j - i;
    };
    Rng rng(7);
    for (int round = 0; round < 200; ++round) {
        const auto s = gen::scanpath(rng, 1 + rng.below(120));
        const double r = rng.uniform(10.0, 60.0);
        const double w = rng.uniform(50.0, 300.0);
        const double r2 = r * rng.uniform(0.3, 1.0);
        const double w2 = w * rng.uniform(0.3, 1.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(run_length(s, i, r2, w2) <= run_length(s, i, r, w));

        // Sample-by-sample the coarser grouping is never finer on a prefix
        // sharing the same anchors: the first fixation can only shrink.
        FixationParams big;
        big.radius_px = r;
        big.window_ms = w;
        FixationParams small = big;
        small.radius_px = r2;
        small.window_ms = w2;
        const auto a = merge_fixations(s, big);
        const auto b = merge_fixations(s, small);
        CHECK(b.front().merged_count <= a.front().merged_count);
    }
}

TEST_CASE("merge regression: a larger radius can yield more fixations")
{
    const std::vector<GazeSample> s{{0, 100, 0}, {40, 60, 0}, {80, 30, 0}, {120, 80, 0}};
    FixationParams p;
    p.radius_px = 32;
    CHECK(merge_fixations(s, p).size() == 2);
    p.radius_px = 50;
    CHECK(merge_fixations(s, p).size() == 3);
}

TEST_CASE("durations")
{
    std::vector<Fixation> f{fix_at(0, 0, 0, -1, true), fix_at(0, 0, 200, -1), fix_at(0, 0, 450, -1)};
    assign_durations(f);
    CHECK(f[0].duration_ms == 0);
    CHECK(f[1].duration_ms == 200);
    CHECK(f[2].duration_ms == 250);

    std::vector<Fixation> single{fix_at(0, 0, 77, -1, true)};
    assign_durations(single);
    CHECK(single[0].duration_ms == 0);

    std::vector<Fixation> bad{fix_at(0, 0, 10, 0), fix_at(0, 0, 5, 0)};
    CHECK_THROWS_AS(assign_durations(bad), InternalError);
}

TEST_CASE("durations telescope")
{
    Rng rng(4);
    for (int round = 0; round < 100; ++round) {
        std::vector<Fixation> f;
        double t = rng.uniform(0, 1000);
        const std::size_t n = 1 + rng.below(80);
        for (std::size_t i = 0; i < n; ++i) {
            f.push_back(fix_at(0, 0, t, -1, i == 0));
            t += std::floor(rng.uniform(0, 500));
        }
        assign_durations(f);
        double sum = 0;
        for (const auto& x : f) {
            CHECK(x.duration_ms >= 0);
            sum += x.duration_ms;
        }
        CHECK(sum == doctest::Approx(f.back().t - f.front().t));
    }
}

TEST_CASE("clip_to_frame tolerance band")
{
    const StimulusFrame frame{0, 0, 1280, 720};
    std::vector<Fixation> f{fix_at(-49, 10, 0, 0), fix_at(-51, 10, 1, 0), fix_at(1330, 770, 2, 0),
                            fix_at(1330.5, 10, 3, 0), fix_at(10, -50, 4, 0), fix_at(10, 770.01, 5, 0)};
    clip_to_frame(f, frame, 50);
    REQUIRE(f.size() == 3);
    CHECK(f[0].x == -49);
    CHECK(f[1].x == 1330);
    CHECK(f[2].y == -50);
}

TEST_CASE("clip_to_frame agrees with the predicate pointwise")
{
    Rng rng(8);
    const StimulusFrame frame{0, 0, 1280, 720};
    std::vector<Fixation> f;
    for (int i = 0; i < 5000; ++i)
        f.push_back(fix_at(rng.uniform(-200, 1480), rng.uniform(-200, 1480), i, 0));
    std::vector<Fixation> want;
    for (const auto& x : f)
        if (x.x >= -50 && x.x <= 1330 && x.y >= -50 && x.y <= 770)
            want.push_back(x);
    clip_to_frame(f, frame, 50);
    CHECK(f == want);
}

TEST_CASE("drop_short keeps the first fixation")
{
    std::vector<Fixation> f{fix_at(0, 0, 0, 0, true), fix_at(0, 0, 40, 40), fix_at(0, 0, 160, 120)};
    drop_short(f, 50);
    REQUIRE(f.size() == 2);
    CHECK(f[0].duration_ms == 0);
    CHECK(f[1].duration_ms == 120);

    std::vector<Fixation> long_ones{fix_at(0, 0, 0, 50, true), fix_at(0, 0, 50, 50), fix_at(0, 0, 150, 100)};
    const auto before = long_ones;
    drop_short(long_ones, 50);
    CHECK(long_ones == before);
}

TEST_CASE("drop_short matches the predicate with first exemption")
{
    Rng rng(12);
    for (int round = 0; round < 50; ++round) {
        std::vector<Fixation> f;
        for (int i = 0; i < 50; ++i)
            f.push_back(fix_at(i, 0, i, std::floor(rng.uniform(0, 120)), i == 0));
        std::vector<Fixation> want;
        for (const auto& x : f)
            if (x.is_first || x.duration_ms >= 50)
                want.push_back(x);
        drop_short(f, 50);
        CHECK(f == want);
    }
}

TEST_CASE("a clipped first fixation passes no exemption on")
{
    const StimulusFrame frame{0, 0, 1280, 720};
    std::vector<GazeSample> s{{0, -500, -500}, {40, 100, 100}, {120, 600, 100}, {300, 100, 600}};
    const auto fx = run_pipeline(s, frame);
    for (const auto& f : fx)
        CHECK_FALSE(f.is_first);
}

TEST_CASE("pipeline: empty trial and determinism")
{
    const StimulusFrame frame{320, 180, 1280, 720};
    CHECK(run_pipeline(std::vector<GazeSample>{}, frame).empty());
    Rng rng(21);
    auto s = gen::scanpath(rng, 150);
    for (auto& x : s) {
        x.x += frame.origin_x;
        x.y += frame.origin_y;
    }
    CHECK(run_pipeline(s, frame) == run_pipeline(s, frame));
}

TEST_CASE("pipeline: two 400 ms dwells 300 px apart")
{
    // Each dwell spans more than one merge window at 25 Hz, so it is split
    // into several fixations; what is preserved is the spatial grouping and
    // the time attributed to each location.
    std::vector<GazeSample> s;
    for (int k = 0; k < 10; ++k)
        s.push_back({k * 40.0, 300, 300});
    for (int k = 0; k < 10; ++k)
        s.push_back({400 + k * 40.0, 600, 300});
    const auto fx = run_pipeline(s, StimulusFrame{});
    double left = 0;
    double right = 0;
    for (const auto& f : fx) {
        CHECK((f.x == 300 || f.x == 600));
        (f.x == 300 ? left : right) += f.duration_ms;
    }
    const double period = 40;
    // The first dwell loses its first cluster (duration 0 by definition).
    CHECK(std::abs(left - 400) <= 2 * period + 120);
    CHECK(std::abs(right - 400) <= period);
}

TEST_CASE("fixation table round trip")
{
    std::vector<TrialFixations> trials{{"p1:t1", {}}, {"p1:t2", {}}};
    Rng rng(31);
    for (auto& t : trials) {
        double time = 0;
        for (int i = 0; i < 20; ++i) {
            time += 40;
            Fixation f = fix_at(std::round(rng.uniform(0, 1280)), std::round(rng.uniform(0, 720)), time,
                                i == 0 ? 0 : 40, i == 0);
            f.merged_count = 1 + rng.below(5);
            t.fixations.push_back(f);
        }
    }
    std::ostringstream os;
    write_fixation_table(os, trials);
    CHECK(os.str().rfind("trial_id,fix_index,x_px,y_px,t_ms,duration_ms,merged_count,is_first\n", 0) == 0);
    CHECK(parse_fixation_table(os.str()) == trials);
}
