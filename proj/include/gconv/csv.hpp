#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gconv/function.hpp"

namespace gconv::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size() && !s.empty();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] inline void parse_error(const std::string& where, std::size_t line, const std::string& msg) {
  fail(ErrorKind::Parse, where + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace detail

/// Z, Zn:<n>, lattice:<d>:<h> or D<n>.
inline GroupSpace parse_group(std::string_view s) {
  s = detail::trim(s);
  auto bad = [&]() -> GroupSpace { fail(ErrorKind::Parse, "unknown group '" + std::string(s) + "'"); };
  if (s == "Z") return GroupSpace::integers();
  if (s.starts_with("Zn:")) {
    std::int64_t n = 0;
    if (!detail::parse_number(s.substr(3), n) || n < 1) return bad();
    return GroupSpace::cyclic(n);
  }
  if (s.starts_with("lattice:")) {
    const auto parts = detail::split(s.substr(8), ':');
    std::size_t d = 0;
    double h = 0;
    if (parts.size() != 2 || !detail::parse_number(parts[0], d) || !detail::parse_number(parts[1], h) || d < 1 ||
        d > kMaxRank || !(h > 0) || !std::isfinite(h))
      return bad();
    return GroupSpace::lattice(d, h);
  }
  if (s.starts_with("D")) {
    std::int64_t n = 0;
    if (!detail::parse_number(s.substr(1), n) || n < 1) return bad();
    return GroupSpace::dihedral(n);
  }
  return bad();
}

inline std::string header(const GroupSpace& G, std::size_t vdim) {
  return "# group=" + G.to_string() + " vdim=" + std::to_string(vdim) + "\n";
}

/// Header line, then one row per support point in lexicographic order.
inline std::string write(const SampledFunction& f) {
  std::string out = header(f.group(), f.vdim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool first = true;
    for (auto c : f.point(i).coords()) {
      if (!first) out += ',';
      out += std::to_string(c);
      first = false;
    }
    for (double v : f.value(i)) {
      out += ',';
      out += gconv::detail::format_real(v);
    }
    out += '\n';
  }
  return out;
}

/// Parses the CSV encoding; errors read "<where>:<line>: <message>".
inline SampledFunction read(std::istream& in, const std::string& where) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<GroupSpace> group;
  std::size_t vdim = 0;

  while (!group && std::getline(in, line)) {
    ++lineno;
    const auto s = detail::trim(line);
    if (s.empty()) continue;
    if (!s.starts_with("#")) detail::parse_error(where, lineno, "expected header '# group=<kind> vdim=<m>'");
    std::istringstream fields{std::string(s.substr(1))};
    std::string tok;
    bool have_vdim = false;
    while (fields >> tok) {
      if (tok.starts_with("group=")) {
        try {
          group = parse_group(std::string_view(tok).substr(6));
        } catch (const Error& e) {
          detail::parse_error(where, lineno, e.what());
        }
      } else if (tok.starts_with("vdim=")) {
        if (!detail::parse_number(std::string_view(tok).substr(5), vdim) || vdim == 0)
          detail::parse_error(where, lineno, "bad vdim '" + tok.substr(5) + "'");
        have_vdim = true;
      } else {
        detail::parse_error(where, lineno, "unexpected header field '" + tok + "'");
      }
    }
    if (!group || !have_vdim) detail::parse_error(where, lineno, "header needs both group= and vdim=");
  }
  if (!group) detail::parse_error(where, lineno == 0 ? 1 : lineno, "missing header");

  const GroupSpace& G = *group;
  const std::size_t rank = G.rank();
  std::map<GroupPoint, std::size_t> seen;
  std::vector<GroupPoint> pts;
  std::vector<double> vals;
  std::vector<std::int64_t> idx(rank);
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::trim(line);
    if (s.empty() || s.starts_with("#")) continue;
    const auto cells = detail::split(s, ',');
    if (cells.size() != rank + vdim) {
      detail::parse_error(where, lineno, "expected " + std::to_string(rank + vdim) + " fields (" +
                                             std::to_string(rank) + " indices, " + std::to_string(vdim) +
                                             " values), got " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < rank; ++k) {
      if (!detail::parse_number(cells[k], idx[k]))
        detail::parse_error(where, lineno, "bad index '" + std::string(detail::trim(cells[k])) + "'");
    }
    const GroupPoint p{std::span<const std::int64_t>(idx)};
    if (!G.contains(p)) detail::parse_error(where, lineno, "point " + p.to_string() + " is not in " + G.to_string());
    if (auto [it, fresh] = seen.emplace(p, lineno); !fresh) {
      detail::parse_error(where, lineno,
                          "duplicate point " + p.to_string() + " (first on line " + std::to_string(it->second) + ")");
    }
    for (std::size_t k = 0; k < vdim; ++k) {
      double v = 0;
      if (!detail::parse_number(cells[rank + k], v) || !std::isfinite(v))
        detail::parse_error(where, lineno, "bad value '" + std::string(detail::trim(cells[rank + k])) + "'");
      vals.push_back(v);
    }
    pts.push_back(p);
  }
  return SampledFunction(G, vdim, std::move(pts), std::move(vals));
}

inline SampledFunction read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, path + ":0: cannot open file");
  return read(in, path);
}

inline SampledFunction parse(const std::string& text, const std::string& where = "<string>") {
  std::istringstream in(text);
  return read(in, where);
}

/// Writes to a sibling temporary file, then renames it over `path`.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::InvalidArgument, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::InvalidArgument, "cannot move output into place at " + path);
  }
}

}  // namespace gconv::csv
