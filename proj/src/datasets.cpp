#include "dpdwald/datasets.hpp"

#include "dpdwald/error.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dpd {

namespace {

// White blood cell counts (times 100) of 16 acute myelogenous leukemia patients.
const std::vector<double> kLeukemia = {23, 7.5, 43, 26, 60, 105, 100, 170, 54, 70, 94, 320, 350, 1000, 520, 1000};

// Ordered differences of inverse fault rates, 14 matched pairs of areas.
const std::vector<double> kTelephone = {-988, -135, -78, 3, 59, 83, 93, 110, 189, 197, 204, 229, 289, 310};

// Height differences, cross- minus self-fertilised Zea mays, 15 pairs.
const std::vector<double> kDarwin = {-67, -48, 6, 8, 14, 16, 23, 24, 28, 29, 41, 49, 56, 60, 75};

constexpr std::uint64_t kLeukemiaChecksum = 0x91833a7495fd01a7ULL;
constexpr std::uint64_t kTelephoneChecksum = 0x35747e8ad845bbf6ULL;
constexpr std::uint64_t kDarwinChecksum = 0xaf1164ed5a55ec2bULL;

NamedDataset builtin(const std::string& name) {
  if (name == "leukemia")
    return {name, kLeukemia, "Gross and Clark (1975), leukemia survival data", "white blood cell count / 100"};
  if (name == "telephone")
    return {name, kTelephone, "Welch (1987); Simpson (1989), telephone line faults",
            "inverse test rate minus inverse control rate"};
  if (name == "darwin")
    return {name, kDarwin, "Darwin (1878), Zea mays fertilisation experiment", "eighths of an inch"};
  throw InputError("unknown dataset '" + name + "'");
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::vector<std::string> builtin_dataset_names() { return {"leukemia", "telephone", "darwin"}; }

std::uint64_t dataset_checksum(const std::vector<double>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::uint64_t expected_checksum(const std::string& name) {
  if (name == "leukemia") return kLeukemiaChecksum;
  if (name == "telephone") return kTelephoneChecksum;
  if (name == "darwin") return kDarwinChecksum;
  throw InputError("unknown dataset '" + name + "'");
}

void verify_builtin_datasets() {
  for (const auto& name : builtin_dataset_names()) {
    if (dataset_checksum(builtin(name).values) != expected_checksum(name))
      throw Error("embedded dataset '" + name + "' does not match its checksum");
  }
}

NamedDataset parse_dataset_text(const std::string& text, const std::string& name) {
  NamedDataset d;
  d.name = name;
  d.source = "file";
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const std::string t = trim(field);
      if (t.empty()) continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw InputError(name + ":" + std::to_string(lineno) + ": cannot parse '" + t + "' as a number");
      d.values.push_back(v);
    }
  }
  if (d.values.empty()) throw InputError(name + ": no data values found");
  return d;
}

NamedDataset load_dataset(const std::string& name_or_path) {
  for (const auto& b : builtin_dataset_names())
    if (name_or_path == b) return builtin(b);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw InputError("'" + name_or_path + "' is neither a built-in dataset nor a readable file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_text(buf.str(), name_or_path);
}

}  // namespace dpd
