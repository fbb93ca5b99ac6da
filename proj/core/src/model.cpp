#include "gazeflow/model.hpp"

#include "gazeflow/error.hpp"

#include <cctype>
#include <cmath>

namespace gazeflow {

bool StimulusFrame::valid() const
{
    return std::isfinite(origin_x) && std::isfinite(origin_y) && std::isfinite(width) &&
           std::isfinite(height) && width > 0.0 && height > 0.0;
}

std::string_view to_string(Task task)
{
    return task == Task::NR ? "NR" : "IS";
}

Task parse_task(std::string_view text)
{
    std::string folded;
    for (char c : text)
        folded.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (folded == "NR")
        return Task::NR;
    if (folded == "IS")
        return Task::IS;
    throw InputError("unknown task '" + std::string(text) + "' (expected NR or IS)");
}

bool ParticipantRecord::complete() const
{
    return language && age && reported_sample_rate_hz && validation_accuracy_pct && screen_w &&
           screen_h && fraction_correct && total_experiment_ms;
}

} // namespace gazeflow
