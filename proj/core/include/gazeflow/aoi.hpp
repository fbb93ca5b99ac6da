#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gazeflow {

// Axis-aligned rectangle in image pixels. Containment is half-open.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    bool contains(double px, double py) const
    {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    bool contains(const Box& other) const
    {
        return other.x >= x && other.y >= y && other.right() <= right() &&
               other.bottom() <= bottom();
    }
    // Positive-area intersection; shared edges do not count.
    bool overlaps(const Box& other) const
    {
        return x < other.right() && other.x < right() && y < other.bottom() && other.y < bottom();
    }

    friend bool operator==(const Box&, const Box&) = default;
};

/// A word's area of interest. `raw` is the detected word box; `box` is the
/// expanded AOI used for fixation assignment (equal to `raw` until expanded).
struct WordBox {
    int token_index = 0;
    std::string text;
    Box raw;
    Box box;
    int line_index = 0;
    bool is_target = false;

    friend bool operator==(const WordBox&, const WordBox&) = default;
};

struct ExpansionParams {
    double horizontal_cap_px = 12.0;
    double vertical_cap_px = 24.0;

    void validate() const;
};

struct TargetSpan {
    std::string question_id;
    int first_token = 0;
    int last_token = 0;

    friend bool operator==(const TargetSpan&, const TargetSpan&) = default;
};

/// Word boxes of one stimulus text plus its annotated answer spans.
struct TextLayout {
    std::string text_id;
    std::vector<WordBox> words;  // sorted by token_index
    std::vector<TargetSpan> spans;

    // Copy of `words` with is_target set from the span(s) of `question_id`.
    std::vector<WordBox> with_targets(std::string_view question_id) const;

    friend bool operator==(const TextLayout&, const TextLayout&) = default;
};

// Groups raw boxes into lines by vertical center (gap threshold: half the
// median box height). Returns a 0-based top-to-bottom line index per box.
std::vector<int> cluster_lines(std::span<const WordBox> words);

/// Grows every raw box into a non-overlapping AOI. Same-line neighbours split
/// the horizontal gap at its midpoint, adjacent lines split the vertical gap,
/// and unconstrained sides get the full cap. Throws InputError listing every
/// overlapping raw pair.
std::vector<WordBox> expand_boxes(std::vector<WordBox> words, const ExpansionParams& params = {});

// Linear scan: token_index of the box containing the point, if any.
std::optional<int> assign_fixation(double x, double y, std::span<const WordBox> boxes);

/// Uniform-grid lookup over expanded boxes; answers exactly like assign_fixation.
class AoiIndex {
public:
    explicit AoiIndex(std::span<const WordBox> boxes, double cell_px = 64.0);

    std::optional<int> lookup(double x, double y) const;

private:
    std::int64_t key(long long cx, long long cy) const;

    std::vector<WordBox> boxes_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

// One JSON object per line:
//   {"text_id", "words": [{token_index, text, x, y, w, h}, ...],
//    "spans": [{question_id, first_token, last_token}, ...]}
// Extra keys (image size, OCR confidence) are ignored.
std::vector<TextLayout> load_boundaries(std::string_view source);
void write_boundaries(std::ostream& out, std::span<const TextLayout> layouts);

} // namespace gazeflow
