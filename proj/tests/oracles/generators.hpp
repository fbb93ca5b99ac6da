#pragma once

// Seeded input generators for property tests.

#include "gazeflow/aoi.hpp"
#include "gazeflow/model.hpp"
#include "gazeflow/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gen {

// Time-sorted samples with gaps in [gap_lo, gap_hi] ms. Positions either jump
// anywhere on the page or stay near the previous one, so both long runs and
// breaks occur.
inline std::vector<gazeflow::GazeSample> scanpath(gazeflow::Rng& rng, std::size_t n,
                                                  double gap_lo = 20.0, double gap_hi = 200.0,
                                                  double w = 1280.0, double h = 720.0)
{
    std::vector<gazeflow::GazeSample> s;
    s.reserve(n);
    double t = rng.uniform(0.0, 100.0);
    double x = rng.uniform(0.0, w);
    double y = rng.uniform(0.0, h);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            t += rng.uniform(gap_lo, gap_hi);
            if (rng.bernoulli(0.25)) {
                x = rng.uniform(0.0, w);
                y = rng.uniform(0.0, h);
            } else {
                x = std::clamp(x + rng.normal(0.0, 14.0), 0.0, w);
                y = std::clamp(y + rng.normal(0.0, 14.0), 0.0, h);
            }
        }
        s.push_back({t, x, y});
    }
    return s;
}

// Non-overlapping raw word boxes on a ragged grid of lines.
inline std::vector<gazeflow::WordBox> layout(gazeflow::Rng& rng, std::size_t max_words = 60)
{
    std::vector<gazeflow::WordBox> words;
    double y = rng.uniform(5.0, 40.0);
    int token = 0;
    const double height = rng.uniform(14.0, 34.0);
    while (y + height < 700.0 && words.size() < max_words) {
        double x = rng.uniform(0.0, 60.0);
        const double line_height = height + rng.uniform(4.0, 60.0);
        while (words.size() < max_words) {
            const double w = rng.uniform(8.0, 160.0);
            if (x + w > 1270.0)
                break;
            gazeflow::WordBox b;
            b.token_index = token++;
            b.text = "w" + std::to_string(b.token_index);
            // Small vertical wobble, as OCR boxes have.
            b.raw = {x, y + rng.uniform(-0.5, 0.5), w, height + rng.uniform(-0.5, 0.5)};
            b.box = b.raw;
            words.push_back(b);
            x += w + rng.uniform(1.0, 45.0);
        }
        y += line_height;
    }
    return words;
}

} // namespace gen
