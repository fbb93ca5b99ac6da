#include "gazeflow/quality.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <cmath>
#include <ostream>

namespace gazeflow {

void QualityThresholds::validate() const
{
    if (!(min_fraction_correct >= 0.0) || !(min_sample_rate_hz >= 0.0) ||
        !(min_accuracy_pct_exclusive >= 0.0))
        throw InputError("quality thresholds must be non-negative");
    if (min_screen_w <= 0 || min_screen_h <= 0)
        throw InputError("minimum screen size must be positive");
}

std::string_view to_string(RejectionReason reason)
{
    switch (reason) {
    case RejectionReason::LowCorrectness:
        return "LowCorrectness";
    case RejectionReason::RecorderError:
        return "RecorderError";
    case RejectionReason::LowSampleRate:
        return "LowSampleRate";
    case RejectionReason::ZeroAccuracy:
        return "ZeroAccuracy";
    case RejectionReason::LowResolution:
        return "LowResolution";
    }
    return "Unknown";
}

std::map<RejectionReason, std::size_t> FilterResult::histogram() const
{
    std::map<RejectionReason, std::size_t> h;
    for (const auto& r : rejected)
        ++h[r.reason];
    return h;
}

std::optional<RejectionReason> first_failed_gate(const ParticipantRecord& p,
                                                 std::span<const TrialRecord* const> trials,
                                                 const QualityThresholds& th)
{
    if (p.fraction_correct && !(*p.fraction_correct > th.min_fraction_correct))
        return RejectionReason::LowCorrectness;

    bool any_samples = false;
    bool targets_ok = true;
    for (const TrialRecord* t : trials) {
        any_samples = any_samples || !t->samples.empty();
        targets_ok = targets_ok && !t->question_id.empty();
    }
    if (!p.complete() || trials.empty() || !any_samples || !targets_ok)
        return RejectionReason::RecorderError;

    if (*p.reported_sample_rate_hz < th.min_sample_rate_hz)
        return RejectionReason::LowSampleRate;
    if (!(*p.validation_accuracy_pct > th.min_accuracy_pct_exclusive))
        return RejectionReason::ZeroAccuracy;
    if (*p.screen_w < th.min_screen_w || *p.screen_h < th.min_screen_h)
        return RejectionReason::LowResolution;
    return std::nullopt;
}

FilterResult filter_participants(std::span<const ParticipantRecord> participants,
                                 std::span<const TrialRecord> trials,
                                 const QualityThresholds& thresholds)
{
    thresholds.validate();
    std::map<std::string, std::vector<const TrialRecord*>> by_participant;
    for (const auto& t : trials)
        by_participant[t.participant_id].push_back(&t);

    FilterResult result;
    for (const auto& p : participants) {
        auto it = by_participant.find(p.participant_id);
        std::span<const TrialRecord* const> own;
        if (it != by_participant.end())
            own = it->second;
        if (auto reason = first_failed_gate(p, own, thresholds))
            result.rejected.push_back(Rejection{p.participant_id, *reason});
        else
            result.kept.push_back(p);
    }
    return result;
}

void write_rejections(std::ostream& out, const FilterResult& result)
{
    CsvWriter w(out);
    w.header({"participant_id", "reason"});
    for (const auto& r : result.rejected) {
        w.field(r.participant_id).field(to_string(r.reason));
        w.end_row();
    }
}

std::string rejection_summary(const FilterResult& result)
{
    const double n = static_cast<double>(result.initial());
    auto pct = [&](std::size_t k) {
        return n > 0 ? format_number(100.0 * static_cast<double>(k) / n) : std::string("NA");
    };
    std::string line = "kept " + std::to_string(result.kept.size()) + " of " +
                       std::to_string(result.initial()) + " (" + pct(result.kept.size()) + "%)";
    for (const auto& [reason, count] : result.histogram())
        line += "; " + std::string(to_string(reason)) + ": " + std::to_string(count) + " (" +
                pct(count) + "%)";
    return line;
}

DropResult drop_empty_trials(std::vector<TrialFeatures> trials)
{
    DropResult result;
    for (auto& t : trials) {
        if (t.has_text_fixation())
            result.kept.push_back(std::move(t));
        else
            ++result.dropped;
    }
    return result;
}

} // namespace gazeflow
