#include "almgren/io.hpp"

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace almgren {

using nlohmann::json;

namespace {

json poly_obj(const ExactPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back({{"alpha", m.exps},
                     {"num", c.get_num().get_str()},
                     {"den", c.get_den().get_str()}});
  }
  return json{{"n", p.dim()}, {"terms", terms}};
}

ExactPoly poly_from_obj(const json& j) {
  ExactPoly p(j.at("n").get<int>());
  for (const auto& t : j.at("terms")) {
    Monomial m(t.at("alpha").get<std::vector<uint32_t>>());
    Rational num = rational_from_string(t.at("num").get<std::string>());
    Rational den = rational_from_string(t.at("den").get<std::string>());
    if (den == 0) throw std::invalid_argument("poly term with zero denominator");
    p.add_term(m, num / den);
  }
  return p;
}

}  // namespace

std::string poly_to_json(const ExactPoly& p) { return poly_obj(p).dump(2); }

ExactPoly poly_from_json(const std::string& text) {
  return poly_from_obj(json::parse(text));
}

std::string basis_to_json(const HhpBasis& b) {
  json elems = json::array();
  for (size_t i = 0; i < b.size(); ++i) {
    elems.push_back({{"poly", poly_obj(b.elements[i])},
                     {"norm2_num", b.norm2[i].get_num().get_str()},
                     {"norm2_den", b.norm2[i].get_den().get_str()}});
  }
  return json{{"manifest", {{"n", b.n}, {"d", b.d}, {"count", b.size()}}},
              {"elements", elems}}
      .dump(2);
}

HhpBasis basis_from_json(const std::string& text) {
  json j = json::parse(text);
  HhpBasis b;
  b.n = j.at("manifest").at("n").get<int>();
  b.d = j.at("manifest").at("d").get<int>();
  for (const auto& e : j.at("elements")) {
    b.elements.push_back(poly_from_obj(e.at("poly")));
    Rational num = rational_from_string(e.at("norm2_num").get<std::string>());
    Rational den = rational_from_string(e.at("norm2_den").get<std::string>());
    b.norm2.push_back(num / den);
  }
  if (b.size() != static_cast<size_t>(j.at("manifest").at("count").get<long>())) {
    throw std::invalid_argument("basis manifest count mismatch");
  }
  return b;
}

std::string expansion_to_json(const Expansion& e) {
  json x0 = json::array();
  for (const auto& c : e.base_point()) x0.push_back(rational_to_string(c));
  json terms = json::array();
  for (const auto& [k, t] : e.terms()) {
    terms.push_back({{"k", k}, {"a", rational_to_string(t.coef)}, {"P", poly_obj(t.poly)}});
  }
  json j{{"n", e.dim()}, {"x0", x0}, {"terms", terms}};
  if (e.scale2() != 1) j["scale2"] = rational_to_string(e.scale2());
  return j.dump(2);
}

Expansion expansion_from_json(const std::string& text) {
  json j = json::parse(text);
  int n = j.at("n").get<int>();
  std::vector<Rational> x0;
  for (const auto& c : j.at("x0")) x0.push_back(rational_from_string(c.get<std::string>()));
  Expansion e(n, x0);
  for (const auto& t : j.at("terms")) {
    e.add_term(t.at("k").get<int>(), poly_from_obj(t.at("P")),
               rational_from_string(t.at("a").get<std::string>()));
  }
  if (j.contains("scale2")) {
    e.set_scale2(rational_from_string(j.at("scale2").get<std::string>()));
  }
  return e;
}

std::string profile_to_csv(const FrequencyProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "r,N,h\n";
  for (size_t i = 0; i < p.radii.size(); ++i) {
    os << p.radii[i] << "," << p.N[i] << "," << p.h[i] << "\n";
  }
  return os.str();
}

std::string mask_to_json(const SetMask& m) {
  // pack members into bits
  std::vector<uint8_t> bytes((m.members.size() + 7) / 8, 0);
  for (size_t i = 0; i < m.members.size(); ++i) {
    if (m.members[i]) bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  return json{{"n", m.n},
              {"spacing", m.spacing},
              {"origin", m.origin},
              {"extents", m.extents},
              {"r", m.r},
              {"bitset", base64_encode(bytes)}}
      .dump(2);
}

SetMask mask_from_json(const std::string& text) {
  json j = json::parse(text);
  SetMask m;
  m.n = j.at("n").get<int>();
  m.spacing = j.at("spacing").get<double>();
  m.origin = j.at("origin").get<std::vector<double>>();
  m.extents = j.at("extents").get<std::vector<int>>();
  m.r = j.at("r").get<double>();
  size_t total = 1;
  for (int e : m.extents) total *= static_cast<size_t>(e);
  std::vector<uint8_t> bytes = base64_decode(j.at("bitset").get<std::string>());
  m.members.assign(total, 0);
  for (size_t i = 0; i < total; ++i) {
    m.members[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  }
  return m;
}

std::string cover_report_to_json(const CoverReport& r) {
  json levels = json::array();
  for (const auto& lvl : r.levels) {
    json balls = json::array();
    for (const auto& b : lvl.balls) {
      balls.push_back({{"center", b.center},
                       {"radius", b.radius},
                       {"degree", b.degree},
                       {"status", to_string(b.status)}});
    }
    levels.push_back({{"degree", lvl.degree}, {"mass", lvl.mass}, {"balls", balls}});
  }
  return json{{"center", r.center},
              {"radius", r.radius},
              {"r", r.r},
              {"lambda", r.lambda},
              {"initial_degree", r.initial_degree},
              {"levels", levels},
              {"terminal_count", r.terminal_count},
              {"terminal_mass", r.terminal_mass},
              {"candidates", r.candidate_count},
              {"escapes", r.escapes},
              {"max_mass_ratio", r.max_mass_ratio},
              {"excluded_certificates", r.excluded_certificates},
              {"required_shrink", r.required_shrink},
              {"alignment_failures", r.alignment_failures}}
      .dump(2);
}

void grid_write(const GridField& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  int32_t n = 2, nodes = g.nodes;
  double spacing = g.spacing(), half = g.half_extent;
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&nodes), 4);
  os.write(reinterpret_cast<const char*>(&spacing), 8);
  os.write(reinterpret_cast<const char*>(&half), 8);
  os.write(reinterpret_cast<const char*>(g.values.data()),
           static_cast<std::streamsize>(g.values.size() * 8));
}

GridField grid_read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  int32_t n = 0, nodes = 0;
  double spacing = 0, half = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&nodes), 4);
  is.read(reinterpret_cast<char*>(&spacing), 8);
  is.read(reinterpret_cast<char*>(&half), 8);
  if (n != 2) throw std::runtime_error("grid file: unsupported dimension");
  GridField g;
  g.nodes = nodes;
  g.half_extent = half;
  g.values.resize(static_cast<size_t>(nodes) * nodes);
  is.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * 8));
  if (!is) throw std::runtime_error("grid file: truncated");
  return g;
}

std::string grid_to_csv(const GridField& g) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,u\n";
  for (int iy = 0; iy < g.nodes; ++iy) {
    for (int ix = 0; ix < g.nodes; ++ix) {
      os << g.coord(ix) << "," << g.coord(iy) << "," << g.at(ix, iy) << "\n";
    }
  }
  return os.str();
}

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (size_t i = 0; i < bytes.size(); i += 3) {
    uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    if (i + 2 < bytes.size()) v |= bytes[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kB64[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < bytes.size() ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<uint8_t> out;
  int buf = 0, bits = 0;
  for (char c : text) {
    int v = val(c);
    if (v < 0) continue;
    buf = (buf << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((buf >> bits) & 0xff));
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << content;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace almgren
