#include "gazeflow/fixation.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

namespace gazeflow {

void FixationParams::validate() const
{
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0)
            throw InputError(std::string(name) + " must be a positive number");
    };
    check(window_ms, "window-ms");
    check(radius_px, "radius-px");
    check(bounds_tolerance_px, "bounds-tolerance-px");
    check(min_fix_ms, "min-fix-ms");
}

std::vector<GazeSample> normalize(std::span<const GazeSample> samples, const StimulusFrame& frame)
{
    std::vector<GazeSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        out.push_back(GazeSample{s.t, s.x - frame.origin_x, s.y - frame.origin_y});
    return out;
}

std::vector<Fixation> merge_fixations(std::span<const GazeSample> samples,
                                      const FixationParams& params)
{
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].t < samples[i - 1].t)
            throw InternalError("merge_fixations: samples are not sorted by time");

    std::vector<Fixation> out;
    std::size_t i = 0;
    while (i < samples.size()) {
        const GazeSample& anchor = samples[i];
        double sum_x = anchor.x;
        double sum_y = anchor.y;
        std::size_t j = i + 1;
        for (; j < samples.size(); ++j) {
            const GazeSample& s = samples[j];
            double dist = std::hypot(s.x - anchor.x, s.y - anchor.y);
            if (!(dist < params.radius_px) || s.t - anchor.t > params.window_ms)
                break;
            sum_x += s.x;
            sum_y += s.y;
        }
        const std::size_t n = j - i;
        Fixation f;
        f.x = sum_x / static_cast<double>(n);
        f.y = sum_y / static_cast<double>(n);
        f.t = params.timestamp == FixationTime::anchor ? anchor.t : samples[j - 1].t;
        f.merged_count = n;
        f.is_first = (i == 0);
        out.push_back(f);
        i = j;
    }
    return out;
}

void assign_durations(std::vector<Fixation>& fixations)
{
    for (std::size_t i = 0; i < fixations.size(); ++i) {
        if (i == 0) {
            fixations[i].duration_ms = 0.0;
            continue;
        }
        double d = fixations[i].t - fixations[i - 1].t;
        if (d < 0.0)
            throw InternalError("assign_durations: fixation timestamps are not monotone");
        fixations[i].duration_ms = d;
    }
}

void clip_to_frame(std::vector<Fixation>& fixations, const StimulusFrame& frame, double tolerance)
{
    std::erase_if(fixations, [&](const Fixation& f) {
        return !(f.x >= -tolerance && f.x <= frame.width + tolerance && f.y >= -tolerance &&
                 f.y <= frame.height + tolerance);
    });
}

void drop_short(std::vector<Fixation>& fixations, double min_fix_ms)
{
    std::erase_if(fixations,
                  [&](const Fixation& f) { return !f.is_first && f.duration_ms < min_fix_ms; });
}

std::vector<Fixation> run_pipeline(std::span<const GazeSample> samples, const StimulusFrame& frame,
                                   const FixationParams& params)
{
    auto image = normalize(samples, frame);
    auto fixations = merge_fixations(image, params);
    assign_durations(fixations);
    clip_to_frame(fixations, frame, params.bounds_tolerance_px);
    drop_short(fixations, params.min_fix_ms);
    return fixations;
}

void write_fixation_table(std::ostream& out, std::span<const TrialFixations> trials)
{
    CsvWriter w(out);
    w.header({"trial_id", "fix_index", "x_px", "y_px", "t_ms", "duration_ms", "merged_count",
              "is_first"});
    for (const auto& trial : trials) {
        for (std::size_t i = 0; i < trial.fixations.size(); ++i) {
            const Fixation& f = trial.fixations[i];
            w.field(trial.trial_id)
                .field(i)
                .field(f.x)
                .field(f.y)
                .field(f.t)
                .field(f.duration_ms)
                .field(f.merged_count)
                .field(f.is_first);
            w.end_row();
        }
    }
}

std::vector<TrialFixations> parse_fixation_table(std::string_view source)
{
    CsvTable table = CsvTable::parse(source);
    std::vector<TrialFixations> out;
    if (table.empty())
        return out;
    const auto c_id = table.require("trial_id");
    const auto c_idx = table.require("fix_index");
    const auto c_x = table.require("x_px");
    const auto c_y = table.require("y_px");
    const auto c_t = table.require("t_ms");
    const auto c_d = table.require("duration_ms");
    const auto c_n = table.require("merged_count");
    const auto c_first = table.require("is_first");

    std::map<std::string, std::size_t> slot;
    std::vector<std::vector<std::pair<long long, Fixation>>> rows;
    for (const auto& r : table.rows()) {
        auto [it, inserted] = slot.emplace(r.fields[c_id], out.size());
        if (inserted) {
            out.push_back(TrialFixations{r.fields[c_id], {}});
            rows.emplace_back();
        }
        Fixation f;
        f.x = table.number(r, c_x);
        f.y = table.number(r, c_y);
        f.t = table.number(r, c_t);
        f.duration_ms = table.number(r, c_d);
        const long long n = table.integer(r, c_n);
        const long long first = table.integer(r, c_first);
        if (n < 1 || f.duration_ms < 0.0 || (first != 0 && first != 1))
            throw InputError("line " + std::to_string(r.line) + ": invalid fixation record");
        f.merged_count = static_cast<std::size_t>(n);
        f.is_first = first == 1;
        rows[it->second].emplace_back(table.integer(r, c_idx), f);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto& group = rows[k];
        std::stable_sort(group.begin(), group.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [idx, f] : group)
            out[k].fixations.push_back(f);
    }
    return out;
}

} // namespace gazeflow
