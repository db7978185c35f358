#include <charconv>
#include <istream>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "slvd/tessellation.hpp"

namespace slvd {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, long line) {
  T value{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::SyntaxError, fmt::format("line {}: bad number '{}'", line, tok), line);
  }
  return value;
}

}  // namespace

Tessellation parse_tes(std::istream& in) {
  enum class Section { Start, Vertices, Faces };
  Section section = Section::Start;
  long declared_v = -1;
  long declared_f = -1;
  std::vector<UnitVector> vertices;
  std::vector<std::vector<int>> faces;

  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto toks = split_ws(raw);
    if (toks.empty() || toks[0].front() == '#') continue;
    const auto tag = toks[0];

    if (tag == "V") {
      if (section != Section::Start || toks.size() != 2) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: unexpected 'V' header", line), line);
      }
      declared_v = parse_number<long>(toks[1], line);
      if (declared_v < 0) throw Error(Errc::SyntaxError, fmt::format("line {}: negative count", line), line);
      section = Section::Vertices;
    } else if (tag == "v") {
      if (section != Section::Vertices || toks.size() != 4) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: malformed vertex line", line), line);
      }
      if (static_cast<long>(vertices.size()) >= declared_v) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: more vertices than declared", line), line);
      }
      const Vec3 p(parse_number<double>(toks[1], line), parse_number<double>(toks[2], line),
                   parse_number<double>(toks[3], line));
      try {
        vertices.emplace_back(p);
      } catch (const Error& e) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: {}", line, e.what()), line);
      }
    } else if (tag == "F") {
      if (section != Section::Vertices || toks.size() != 2) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: unexpected 'F' header", line), line);
      }
      if (static_cast<long>(vertices.size()) != declared_v) {
        throw Error(Errc::SyntaxError,
                    fmt::format("line {}: {} vertices declared, {} given", line, declared_v,
                                vertices.size()),
                    line);
      }
      declared_f = parse_number<long>(toks[1], line);
      if (declared_f < 0) throw Error(Errc::SyntaxError, fmt::format("line {}: negative count", line), line);
      section = Section::Faces;
    } else if (tag == "f") {
      if (section != Section::Faces || toks.size() < 2) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: malformed face line", line), line);
      }
      if (static_cast<long>(faces.size()) >= declared_f) {
        throw Error(Errc::SyntaxError, fmt::format("line {}: more faces than declared", line), line);
      }
      std::vector<int> cycle;
      cycle.reserve(toks.size() - 1);
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const long idx = parse_number<long>(toks[k], line);
        if (idx < 0 || idx >= declared_v) {
          throw Error(Errc::IndexError,
                      fmt::format("line {}: vertex index {} out of range [0, {})", line, idx, declared_v),
                      line);
        }
        cycle.push_back(static_cast<int>(idx));
      }
      faces.push_back(std::move(cycle));
    } else {
      throw Error(Errc::SyntaxError, fmt::format("line {}: unknown record '{}'", line, tag), line);
    }
  }

  if (section != Section::Faces || static_cast<long>(faces.size()) != declared_f) {
    throw Error(Errc::SyntaxError,
                fmt::format("line {}: truncated input ({} of {} faces)", line, faces.size(),
                            declared_f < 0 ? 0 : declared_f),
                line);
  }
  Tessellation t(std::move(vertices), std::move(faces));
  if (t.duplicate_directed_edges() > 0) {
    throw Error(Errc::MixedOrientation,
                fmt::format("{} directed edges repeat; faces must all be counter-clockwise",
                            t.duplicate_directed_edges()));
  }
  return t;
}

Tessellation parse_tes(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tes(in);
}

std::string serialize_tes(const Tessellation& t, std::string_view header_comment) {
  std::string out;
  if (!header_comment.empty()) {
    std::istringstream lines{std::string(header_comment)};
    for (std::string l; std::getline(lines, l);) out += "# " + l + '\n';
  }
  out += fmt::format("V {}\n", t.vertex_count());
  for (const auto& v : t.vertices()) {
    out += fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  }
  out += fmt::format("F {}\n", t.face_count());
  for (const auto& cycle : t.faces()) {
    out += 'f';
    for (int v : cycle) out += fmt::format(" {}", v);
    out += '\n';
  }
  return out;
}

}  // namespace slvd
