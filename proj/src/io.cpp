#include <crjet/io.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

namespace crjet
{

namespace
{

std::string trim(const std::string &s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string &s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::vector<std::string> split_lines(const std::string &text)
{
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    return lines;
}

bool is_ignorable(const std::string &line)
{
    const std::string t = trim(line);
    return t.empty() || t[0] == '#';
}

int parse_int(const std::string &s, int line)
{
    const std::string t = trim(s);
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(t, &used);
    } catch (const std::exception &) {
        throw ParseError("expected an integer, got '" + t + "'", line);
    }
    if (used != t.size()) {
        throw ParseError("expected an integer, got '" + t + "'", line);
    }
    return v;
}

} // namespace

template <typename S>
std::string format_series(const Series<S> &f)
{
    std::ostringstream os;
    os << "vars: " << f.vars().joined() << " ; trunc: " << f.trunc() << "\n";
    for (const auto &t : f.terms()) {
        for (std::size_t i = 0; i < f.vars().size(); ++i) {
            os << key_exponent(t.key, i) << ' ';
        }
        os << ": " << ScalarTraits<S>::format(t.coeff) << "\n";
    }
    return os.str();
}

template <typename S>
Series<S> parse_series_lines(const std::vector<std::string> &lines, std::size_t begin, std::size_t end,
                             int first_line)
{
    std::size_t i = begin;
    while (i < end && is_ignorable(lines[i])) {
        ++i;
    }
    if (i >= end) {
        throw ParseError("missing series header 'vars: ... ; trunc: N'", first_line + static_cast<int>(i - begin));
    }
    const int header_line = first_line + static_cast<int>(i - begin);
    const std::string header = trim(lines[i]);
    if (header.rfind("vars:", 0) != 0) {
        throw ParseError("expected series header 'vars: ... ; trunc: N'", header_line);
    }
    const auto semi = header.find(';');
    if (semi == std::string::npos) {
        throw ParseError("series header lacks '; trunc: N'", header_line);
    }
    const std::vector<std::string> names = split_ws(header.substr(5, semi - 5));
    const std::string rest = trim(header.substr(semi + 1));
    if (rest.rfind("trunc:", 0) != 0) {
        throw ParseError("series header lacks 'trunc:'", header_line);
    }
    const int trunc = parse_int(rest.substr(6), header_line);
    if (trunc < 0) {
        throw ParseError("negative truncation order", header_line);
    }
    VarList vars;
    try {
        vars = VarList(names);
    } catch (const Error &e) {
        throw ParseError(e.what(), header_line);
    }
    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    for (++i; i < end; ++i) {
        if (is_ignorable(lines[i])) {
            continue;
        }
        const int ln = first_line + static_cast<int>(i - begin);
        const std::string &line = lines[i];
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError("term line lacks ':'", ln);
        }
        const std::vector<std::string> exps = split_ws(line.substr(0, colon));
        const std::vector<std::string> coeff = split_ws(line.substr(colon + 1));
        if (exps.size() != vars.size()) {
            throw ParseError("expected " + std::to_string(vars.size()) + " exponents, got "
                                 + std::to_string(exps.size()),
                             ln);
        }
        if (coeff.size() != 2) {
            throw ParseError("expected coefficient 're im'", ln);
        }
        Exponents e;
        int deg = 0;
        for (const auto &x : exps) {
            const int v = parse_int(x, ln);
            if (v < 0 || v > kMaxExponent) {
                throw ParseError("exponent out of range", ln);
            }
            e.push_back(v);
            deg += v;
        }
        if (deg > trunc) {
            throw ParseError("term of degree " + std::to_string(deg) + " exceeds trunc " + std::to_string(trunc), ln);
        }
        S c;
        try {
            c = ScalarTraits<S>::parse(coeff[0], coeff[1]);
        } catch (const Error &err) {
            throw ParseError(err.what(), ln);
        }
        const MonomialKey key = pack_exponents(e);
        if (acc.count(key)) {
            throw ParseError("duplicate monomial", ln);
        }
        acc.emplace(key, c);
    }
    return Series<S>::from_terms(vars, trunc, ScalarTraits<S>::default_tolerance(), std::move(acc));
}

template <typename S>
Series<S> parse_series(const std::string &text)
{
    const auto lines = split_lines(text);
    return parse_series_lines<S>(lines, 0, lines.size(), 1);
}

const DocEntry *Document::find(const std::string &label) const
{
    for (const auto &e : entries) {
        if (e.label == label) {
            return &e;
        }
    }
    return nullptr;
}

const DocEntry &Document::get(const std::string &label) const
{
    const DocEntry *e = find(label);
    if (!e) {
        throw ParseError("missing entry '" + label + "'", 0);
    }
    return *e;
}

int Document::get_int(const std::string &label) const
{
    const DocEntry &e = get(label);
    return parse_int(e.value, e.line);
}

std::vector<int> Document::get_ints(const std::string &label) const
{
    const DocEntry &e = get(label);
    std::vector<int> out;
    std::string v = e.value;
    for (char &c : v) {
        if (c == ',' || c == '(' || c == ')') {
            c = ' ';
        }
    }
    for (const auto &tok : split_ws(v)) {
        out.push_back(parse_int(tok, e.line));
    }
    return out;
}

Document parse_document(const std::string &text)
{
    Document doc;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i) + 1;
        if (is_ignorable(lines[i])) {
            continue;
        }
        const std::string t = trim(lines[i]);
        const bool block_line = t.rfind("vars:", 0) == 0 || std::isdigit(static_cast<unsigned char>(t[0]));
        if (block_line) {
            if (doc.entries.empty()) {
                throw ParseError("series block without a label", ln);
            }
            auto &e = doc.entries.back();
            if (e.block.empty()) {
                e.block_line = ln;
            } else {
                // Keep line numbering aligned by padding skipped lines.
                const int expected = e.block_line + static_cast<int>(e.block.size());
                for (int k = expected; k < ln; ++k) {
                    e.block.emplace_back();
                }
            }
            e.block.push_back(lines[i]);
            continue;
        }
        const auto colon = t.find(':');
        if (colon == std::string::npos || colon == 0) {
            throw ParseError("expected 'label: value'", ln);
        }
        const std::string label = trim(t.substr(0, colon));
        for (char c : label) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
                throw ParseError("malformed label '" + label + "'", ln);
            }
        }
        doc.entries.push_back(DocEntry{label, trim(t.substr(colon + 1)), {}, ln, 0});
    }
    return doc;
}

template <typename S>
Series<S> entry_series(const DocEntry &e)
{
    if (e.block.empty()) {
        throw ParseError("entry '" + e.label + "' has no series block", e.line);
    }
    return parse_series_lines<S>(e.block, 0, e.block.size(), e.block_line);
}

template <typename S>
std::string format_block(const std::string &label, const Series<S> &f)
{
    return label + ":\n" + format_series(f);
}

std::string format_ints(const std::vector<int> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += std::to_string(v[i]);
    }
    return out;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'", 0);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << text;
}

#define CRJET_INSTANTIATE_IO(S)                                                                                  \
    template std::string format_series(const Series<S> &);                                                     \
    template Series<S> parse_series_lines(const std::vector<std::string> &, std::size_t, std::size_t, int);    \
    template Series<S> parse_series(const std::string &);                                                      \
    template Series<S> entry_series(const DocEntry &);                                                         \
    template std::string format_block(const std::string &, const Series<S> &);

CRJET_INSTANTIATE_IO(Gaussian)
CRJET_INSTANTIATE_IO(FloatComplex)

} // namespace crjet
