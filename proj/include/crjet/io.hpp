#ifndef CRJET_IO_HPP
#define CRJET_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <crjet/series.hpp>

namespace crjet
{

// Series text format:
//   vars: z1 z2 ... ; trunc: N
//   e1 e2 ... ek : re im
// one term per line in graded-lex order. The exact backend writes rationals
// a/b, the float backend decimal literals.
template <typename S>
std::string format_series(const Series<S> &f);

// Parses a series from lines[begin, end). first_line is the 1-based line number
// of lines[begin] in the enclosing file, used for error messages.
template <typename S>
Series<S> parse_series_lines(const std::vector<std::string> &lines, std::size_t begin, std::size_t end,
                             int first_line = 1);

template <typename S>
Series<S> parse_series(const std::string &text);

// A labeled container: lines "label: value", each optionally followed by an
// indented or unlabeled series block. Blank lines and lines starting with '#'
// are ignored.
struct DocEntry {
    std::string label;
    std::string value;
    std::vector<std::string> block;
    int line = 0;       // line of the label
    int block_line = 0; // line of the first block line
};

struct Document {
    std::vector<DocEntry> entries;

    const DocEntry *find(const std::string &label) const;
    const DocEntry &get(const std::string &label) const;
    int get_int(const std::string &label) const;
    std::vector<int> get_ints(const std::string &label) const;
};

Document parse_document(const std::string &text);
std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &text);

template <typename S>
Series<S> entry_series(const DocEntry &e);

template <typename S>
std::string format_block(const std::string &label, const Series<S> &f);

std::string format_ints(const std::vector<int> &v);

} // namespace crjet

#endif
