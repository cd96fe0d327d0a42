#ifndef RPZ_IO_HPP
#define RPZ_IO_HPP

#include <string>
#include <vector>

namespace rpz {

// Shortest round-trip decimal form; used everywhere CSV/JSON output must be
// byte-reproducible across runs.
std::string fmt_double(double x);

std::string join_csv_row(const std::vector<std::string>& cells);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rpz

#endif
