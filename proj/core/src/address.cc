#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "leadrisk/ingest.h"

namespace leadrisk {
namespace {

// Street suffix and direction abbreviations (USPS style).
constexpr std::array<std::pair<std::string_view, std::string_view>, 34> kAddressTokens = {{
    {"STREET", "ST"},     {"STR", "ST"},        {"AVENUE", "AVE"},   {"AV", "AVE"},
    {"AVN", "AVE"},       {"ROAD", "RD"},       {"DRIVE", "DR"},     {"DRV", "DR"},
    {"BOULEVARD", "BLVD"}, {"BOUL", "BLVD"},    {"LANE", "LN"},      {"COURT", "CT"},
    {"PLACE", "PL"},      {"PARKWAY", "PKWY"},  {"PKY", "PKWY"},     {"CIRCLE", "CIR"},
    {"TERRACE", "TER"},   {"HIGHWAY", "HWY"},   {"TRAIL", "TRL"},    {"SQUARE", "SQ"},
    {"EXPRESSWAY", "EXPY"}, {"ALLEY", "ALY"},   {"WAY", "WAY"},      {"POINT", "PT"},
    {"NORTH", "N"},       {"SOUTH", "S"},       {"EAST", "E"},       {"WEST", "W"},
    {"NORTHEAST", "NE"},  {"NORTHWEST", "NW"},  {"SOUTHEAST", "SE"}, {"SOUTHWEST", "SW"},
    {"APARTMENT", "APT"}, {"SUITE", "STE"},
}};

std::string_view CanonicalToken(std::string_view token) {
  for (const auto& [from, to] : kAddressTokens) {
    if (token == from) return to;
  }
  return token;
}

}  // namespace

std::string NormalizeAddress(std::string_view address) {
  std::string cleaned;
  cleaned.reserve(address.size());
  for (char c : address) {
    const auto uc = static_cast<unsigned char>(c);
    if (c == '\'') continue;
    if (std::isalnum(uc)) {
      cleaned.push_back(static_cast<char>(std::toupper(uc)));
    } else {
      cleaned.push_back(' ');
    }
  }
  std::string out;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    if (j > i) {
      if (!out.empty()) out.push_back(' ');
      out += CanonicalToken(std::string_view(cleaned).substr(i, j - i));
    }
    i = j;
  }
  return out;
}

}  // namespace leadrisk
