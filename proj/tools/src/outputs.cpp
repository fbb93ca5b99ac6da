#include "gazeflow_cli/outputs.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <ostream>
#include <system_error>

namespace gazeflow::cli {

namespace fs = std::filesystem;

void PendingOutputs::note_input(const fs::path& path)
{
    inputs_.push_back(path);
}

void PendingOutputs::add(fs::path path, std::string contents)
{
    paths_.push_back(std::move(path));
    contents_.push_back(std::move(contents));
}

void PendingOutputs::commit()
{
    for (const auto& out : paths_) {
        for (const auto& in : inputs_) {
            std::error_code ec;
            if (fs::exists(out, ec) && fs::equivalent(out, in, ec))
                throw InputError("refusing to overwrite input file " + in.string());
        }
    }

    std::vector<fs::path> staged;
    try {
        for (std::size_t i = 0; i < paths_.size(); ++i) {
            const fs::path& target = paths_[i];
            if (target.has_parent_path())
                fs::create_directories(target.parent_path());
            fs::path tmp = target;
            tmp += ".partial";
            write_file(tmp.string(), contents_[i]);
            staged.push_back(std::move(tmp));
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& tmp : staged)
            fs::remove(tmp, ec);
        throw;
    }
    for (std::size_t i = 0; i < paths_.size(); ++i)
        fs::rename(staged[i], paths_[i]);
}

TextTable::TextTable(std::vector<std::string> header)
{
    rows_.push_back(std::move(header));
}

void TextTable::add_row(std::vector<std::string> cells)
{
    cells.resize(rows_.front().size());
    rows_.push_back(std::move(cells));
}

void TextTable::print(std::ostream& out) const
{
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& row : rows_)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());

    auto rule = [&] {
        for (std::size_t c = 0; c < width.size(); ++c)
            out << (c ? "  " : "") << std::string(width[c], '-');
        out << '\n';
    };
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto& row = rows_[r];
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                line += "  ";
            // First column left-aligned, numbers right-aligned.
            const std::string pad(width[c] - row[c].size(), ' ');
            line += c == 0 ? row[c] + pad : pad + row[c];
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out << line << '\n';
        if (r == 0)
            rule();
    }
}

} // namespace gazeflow::cli
