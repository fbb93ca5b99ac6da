#include "gazeflow/aoi.hpp"

#include "gazeflow/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

namespace gazeflow {

using nlohmann::json;

void ExpansionParams::validate() const
{
    if (!std::isfinite(horizontal_cap_px) || horizontal_cap_px < 0.0)
        throw InputError("horizontal margin cap must be non-negative");
    if (!std::isfinite(vertical_cap_px) || vertical_cap_px < 0.0)
        throw InputError("vertical margin cap must be non-negative");
}

std::vector<WordBox> TextLayout::with_targets(std::string_view question_id) const
{
    std::vector<WordBox> out = words;
    for (auto& w : out) {
        w.is_target = false;
        for (const auto& span : spans)
            if (span.question_id == question_id && w.token_index >= span.first_token &&
                w.token_index <= span.last_token)
                w.is_target = true;
    }
    return out;
}

std::vector<int> cluster_lines(std::span<const WordBox> words)
{
    std::vector<int> lines(words.size(), 0);
    if (words.empty())
        return lines;

    std::vector<double> heights;
    heights.reserve(words.size());
    for (const auto& w : words)
        heights.push_back(w.raw.h);
    std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
    const double threshold = 0.5 * heights[heights.size() / 2];

    std::vector<std::size_t> order(words.size());
    std::iota(order.begin(), order.end(), 0);
    auto center = [&](std::size_t i) { return words[i].raw.y + 0.5 * words[i].raw.h; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return center(a) < center(b); });

    int line = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && center(order[k]) - center(order[k - 1]) > threshold)
            ++line;
        lines[order[k]] = line;
    }
    return lines;
}

namespace {

void check_raw_boxes(std::span<const WordBox> words)
{
    std::string pairs;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const Box& b = words[i].raw;
        if (!(std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
              std::isfinite(b.h) && b.w > 0.0 && b.h > 0.0))
            throw InputError("malformed box for token " + std::to_string(words[i].token_index));
        for (std::size_t j = i + 1; j < words.size(); ++j)
            if (b.overlaps(words[j].raw))
                pairs += " (" + std::to_string(words[i].token_index) + "," +
                         std::to_string(words[j].token_index) + ")";
    }
    if (!pairs.empty())
        throw InputError("overlapping word boxes:" + pairs);
}

struct Margins {
    double left = 0.0;
    double right = 0.0;
    double top = 0.0;
    double bottom = 0.0;
};

// Storing origin plus extent means x + w can land an ulp away from the edge we
// asked for. Nudge the extent so the far edge stays at or below `hi` while
// still reaching `raw_hi`.
void set_span(double& origin, double& extent, double lo, double hi, double raw_hi)
{
    origin = lo;
    extent = hi - lo;
    while (origin + extent > hi)
        extent = std::nextafter(extent, -INFINITY);
    while (origin + extent < raw_hi && origin + extent < hi)
        extent = std::nextafter(extent, INFINITY);
}

// Splits the raw gap between a and b along the axis that separates them more.
void separate(WordBox& a, WordBox& b)
{
    const double gap_ab_x = b.raw.x - a.raw.right();
    const double gap_ba_x = a.raw.x - b.raw.right();
    const double gap_ab_y = b.raw.y - a.raw.bottom();
    const double gap_ba_y = a.raw.y - b.raw.bottom();
    const double gx = std::max(gap_ab_x, gap_ba_x);
    const double gy = std::max(gap_ab_y, gap_ba_y);
    if (gx >= gy) {
        WordBox& left = gap_ab_x >= gap_ba_x ? a : b;
        WordBox& right = gap_ab_x >= gap_ba_x ? b : a;
        const double mid = 0.5 * (left.raw.right() + right.raw.x);
        const double r = std::min(left.box.right(), mid);
        set_span(left.box.x, left.box.w, left.box.x, r, left.raw.right());
        const double l = std::max(right.box.x, mid);
        set_span(right.box.x, right.box.w, l, right.box.right(), right.raw.right());
    } else {
        WordBox& upper = gap_ab_y >= gap_ba_y ? a : b;
        WordBox& lower = gap_ab_y >= gap_ba_y ? b : a;
        const double mid = 0.5 * (upper.raw.bottom() + lower.raw.y);
        const double bottom = std::min(upper.box.bottom(), mid);
        set_span(upper.box.y, upper.box.h, upper.box.y, bottom, upper.raw.bottom());
        const double top = std::max(lower.box.y, mid);
        set_span(lower.box.y, lower.box.h, top, lower.box.bottom(), lower.raw.bottom());
    }
}

} // namespace

std::vector<WordBox> expand_boxes(std::vector<WordBox> words, const ExpansionParams& params)
{
    params.validate();
    check_raw_boxes(words);

    const std::vector<int> lines = cluster_lines(words);
    const int n_lines = words.empty() ? 0 : *std::max_element(lines.begin(), lines.end()) + 1;

    std::vector<std::vector<std::size_t>> by_line(static_cast<std::size_t>(n_lines));
    for (std::size_t i = 0; i < words.size(); ++i) {
        words[i].line_index = lines[i];
        by_line[static_cast<std::size_t>(lines[i])].push_back(i);
    }

    std::vector<double> line_top(by_line.size());
    std::vector<double> line_bottom(by_line.size());
    for (std::size_t l = 0; l < by_line.size(); ++l) {
        line_top[l] = INFINITY;
        line_bottom[l] = -INFINITY;
        for (std::size_t i : by_line[l]) {
            line_top[l] = std::min(line_top[l], words[i].raw.y);
            line_bottom[l] = std::max(line_bottom[l], words[i].raw.bottom());
        }
    }

    const double hcap = params.horizontal_cap_px;
    const double vcap = params.vertical_cap_px;
    std::vector<Margins> margins(words.size());
    for (std::size_t l = 0; l < by_line.size(); ++l) {
        auto& members = by_line[l];
        std::sort(members.begin(), members.end(),
                  [&](std::size_t a, std::size_t b) { return words[a].raw.x < words[b].raw.x; });

        const double top = l > 0 ? std::min(vcap, std::max(0.0, line_top[l] - line_bottom[l - 1]) / 2)
                                  : vcap;
        const double bottom =
            l + 1 < by_line.size()
                ? std::min(vcap, std::max(0.0, line_top[l + 1] - line_bottom[l]) / 2)
                : vcap;

        for (std::size_t k = 0; k < members.size(); ++k) {
            Margins& m = margins[members[k]];
            const Box& raw = words[members[k]].raw;
            m.top = top;
            m.bottom = bottom;
            m.left = k > 0 ? std::min(hcap, std::max(0.0, raw.x - words[members[k - 1]].raw.right()) / 2)
                           : hcap;
            m.right = k + 1 < members.size()
                          ? std::min(hcap, std::max(0.0, words[members[k + 1]].raw.x - raw.right()) / 2)
                          : hcap;
        }
    }

    for (std::size_t i = 0; i < words.size(); ++i) {
        const Box& raw = words[i].raw;
        const Margins& m = margins[i];
        Box& box = words[i].box;
        set_span(box.x, box.w, raw.x - m.left, raw.right() + m.right, raw.right());
        set_span(box.y, box.h, raw.y - m.top, raw.bottom() + m.bottom, raw.bottom());
    }

    // Irregular layouts (ragged baselines, boxes straddling lines) can still
    // collide after the line-based pass.
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
            if (words[i].box.overlaps(words[j].box))
                separate(words[i], words[j]);

    return words;
}

std::optional<int> assign_fixation(double x, double y, std::span<const WordBox> boxes)
{
    for (const auto& b : boxes)
        if (b.box.contains(x, y))
            return b.token_index;
    return std::nullopt;
}

AoiIndex::AoiIndex(std::span<const WordBox> boxes, double cell_px)
    : boxes_(boxes.begin(), boxes.end()), cell_(cell_px)
{
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        const Box& b = boxes_[i].box;
        const auto x0 = static_cast<long long>(std::floor(b.x / cell_));
        const auto x1 = static_cast<long long>(std::floor(b.right() / cell_));
        const auto y0 = static_cast<long long>(std::floor(b.y / cell_));
        const auto y1 = static_cast<long long>(std::floor(b.bottom() / cell_));
        for (long long cx = x0; cx <= x1; ++cx)
            for (long long cy = y0; cy <= y1; ++cy)
                cells_[key(cx, cy)].push_back(i);
    }
}

std::int64_t AoiIndex::key(long long cx, long long cy) const
{
    return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::int64_t>(cy & 0xffffffffLL);
}

std::optional<int> AoiIndex::lookup(double x, double y) const
{
    if (!std::isfinite(x) || !std::isfinite(y))
        return std::nullopt;
    const auto cx = static_cast<long long>(std::floor(x / cell_));
    const auto cy = static_cast<long long>(std::floor(y / cell_));
    auto it = cells_.find(key(cx, cy));
    if (it == cells_.end())
        return std::nullopt;
    // Candidates are visited in input order so ties resolve as in the linear scan.
    for (std::size_t i : it->second)
        if (boxes_[i].box.contains(x, y))
            return boxes_[i].token_index;
    return std::nullopt;
}

namespace {

double box_number(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw InputError("line " + std::to_string(line) + ": malformed box, '" + key +
                         "' missing or not a number");
    return it->get<double>();
}

int box_int(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer())
        throw InputError("line " + std::to_string(line) + ": '" + key +
                         "' missing or not an integer");
    return it->get<int>();
}

} // namespace

std::vector<TextLayout> load_boundaries(std::string_view source)
{
    std::vector<TextLayout> out;
    std::set<std::string> seen_texts;
    std::size_t pos = 0;
    std::size_t line = 0;
    while (pos < source.size()) {
        std::size_t end = source.find('\n', pos);
        if (end == std::string_view::npos)
            end = source.size();
        std::string_view text = source.substr(pos, end - pos);
        pos = end + 1;
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;

        json obj;
        try {
            obj = json::parse(text);
        } catch (const json::parse_error& e) {
            throw InputError("line " + std::to_string(line) + ": malformed JSON record: " + e.what());
        }
        const std::string where = "line " + std::to_string(line) + ": ";
        if (!obj.is_object() || !obj.contains("text_id") || !obj.contains("words") ||
            !obj["words"].is_array())
            throw InputError(where + "boundary record needs 'text_id' and a 'words' array");

        TextLayout layout;
        const json& id = obj["text_id"];
        layout.text_id = id.is_string() ? id.get<std::string>() : id.dump();
        if (!seen_texts.insert(layout.text_id).second)
            throw InputError(where + "duplicate text_id '" + layout.text_id + "'");
        if (obj["words"].empty())
            throw InputError(where + "text '" + layout.text_id + "' has no words");

        std::set<int> tokens;
        for (const json& w : obj["words"]) {
            if (!w.is_object())
                throw InputError(where + "word entries must be objects");
            WordBox box;
            box.token_index = box_int(w, "token_index", line);
            if (box.token_index < 0)
                throw InputError(where + "negative token_index");
            if (!tokens.insert(box.token_index).second)
                throw InputError(where + "duplicate token_index " +
                                 std::to_string(box.token_index) + " in text '" +
                                 layout.text_id + "'");
            if (auto t = w.find("text"); t != w.end() && t->is_string())
                box.text = t->get<std::string>();
            box.raw = Box{box_number(w, "x", line), box_number(w, "y", line),
                          box_number(w, "w", line), box_number(w, "h", line)};
            if (!(box.raw.w > 0.0 && box.raw.h > 0.0))
                throw InputError(where + "malformed box for token " +
                                 std::to_string(box.token_index) + ": w and h must be positive");
            box.box = box.raw;
            layout.words.push_back(std::move(box));
        }
        std::sort(layout.words.begin(), layout.words.end(),
                  [](const WordBox& a, const WordBox& b) { return a.token_index < b.token_index; });
        const std::vector<int> lines = cluster_lines(layout.words);
        for (std::size_t i = 0; i < layout.words.size(); ++i)
            layout.words[i].line_index = lines[i];

        if (auto spans = obj.find("spans"); spans != obj.end() && !spans->is_null()) {
            if (!spans->is_array())
                throw InputError(where + "'spans' must be an array");
            for (const json& s : *spans) {
                TargetSpan span;
                auto q = s.find("question_id");
                if (q == s.end() || !q->is_string())
                    throw InputError(where + "span without question_id");
                span.question_id = q->get<std::string>();
                span.first_token = box_int(s, "first_token", line);
                span.last_token = box_int(s, "last_token", line);
                if (span.first_token > span.last_token || !tokens.contains(span.first_token) ||
                    !tokens.contains(span.last_token))
                    throw InputError(where + "span '" + span.question_id +
                                     "' does not cover a valid token range");
                layout.spans.push_back(std::move(span));
            }
        }
        out.push_back(std::move(layout));
    }
    return out;
}

void write_boundaries(std::ostream& out, std::span<const TextLayout> layouts)
{
    for (const auto& layout : layouts) {
        json obj = json::object();
        obj["text_id"] = layout.text_id;
        json words = json::array();
        for (const auto& w : layout.words)
            words.push_back({{"token_index", w.token_index},
                             {"text", w.text},
                             {"x", w.raw.x},
                             {"y", w.raw.y},
                             {"w", w.raw.w},
                             {"h", w.raw.h}});
        obj["words"] = std::move(words);
        json spans = json::array();
        for (const auto& s : layout.spans)
            spans.push_back({{"question_id", s.question_id},
                             {"first_token", s.first_token},
                             {"last_token", s.last_token}});
        obj["spans"] = std::move(spans);
        out << obj.dump() << '\n';
    }
}

} // namespace gazeflow
