#pragma once

#include <string>
#include <vector>

#include "almgren/covering.hpp"
#include "almgren/elliptic.hpp"
#include "almgren/expansion.hpp"
#include "almgren/geometry.hpp"
#include "almgren/hhp.hpp"

namespace almgren {

// ---- polynomials: {"n": int, "terms": [{"alpha": [..], "num": "...", "den": "..."}]}
std::string poly_to_json(const ExactPoly& p);
ExactPoly poly_from_json(const std::string& text);

// ---- basis files: polys in the poly schema plus {"n","d","count"} manifest
std::string basis_to_json(const HhpBasis& b);
HhpBasis basis_from_json(const std::string& text);

// ---- expansions: {"n", "x0": [rationals], "terms": [{"k","a","P"}]}
std::string expansion_to_json(const Expansion& e);
Expansion expansion_from_json(const std::string& text);

// ---- frequency profiles: CSV with columns r,N,h
std::string profile_to_csv(const FrequencyProfile& p);

// ---- set masks: {"spacing","origin","extents","r","bitset": base64}
std::string mask_to_json(const SetMask& m);
SetMask mask_from_json(const std::string& text);

// ---- cover reports
std::string cover_report_to_json(const CoverReport& r);

// ---- grid fields: flat binary, little-endian doubles after a header
void grid_write(const GridField& g, const std::string& path);
GridField grid_read(const std::string& path);
std::string grid_to_csv(const GridField& g);

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace almgren
