#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow::cli {

/// Files a subcommand intends to write. Nothing touches the disk until
/// commit(), which stages every file next to its target and then renames them
/// into place, so a failing command leaves no partial outputs.
class PendingOutputs {
public:
    // Remembers an input so that commit() can refuse to overwrite it.
    void note_input(const std::filesystem::path& path);
    void add(std::filesystem::path path, std::string contents);
    void commit();

    const std::vector<std::filesystem::path>& paths() const { return paths_; }

private:
    std::vector<std::filesystem::path> inputs_;
    std::vector<std::filesystem::path> paths_;
    std::vector<std::string> contents_;
};

/// Column-aligned plain-text table.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    void print(std::ostream& out) const;

private:
    std::vector<std::vector<std::string>> rows_;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any call is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn);

} // namespace gazeflow::cli

#include "gazeflow_cli/parallel.ipp"
