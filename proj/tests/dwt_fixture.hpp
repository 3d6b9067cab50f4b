#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvff/dwt.hpp"

namespace pvff::testutil {

/// One reference decomposition produced by tests/fixtures/gen_dwt_reference.py.
struct DwtReferenceCase {
  int signal_id = 0;
  dwt::WaveletName wavelet = dwt::WaveletName::haar;
  std::size_t levels = 0;
  std::map<std::string, std::vector<double>> bands;  // "a3", "d3", ...
};

struct DwtReference {
  std::map<int, std::vector<double>> signals;
  std::vector<DwtReferenceCase> cases;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline DwtReference load_dwt_reference(const std::string& dir) {
  DwtReference ref;
  std::ifstream sig(dir + "/dwt_reference_signals.csv");
  std::ifstream coef(dir + "/dwt_reference_coeffs.csv");
  if (!sig || !coef) throw std::runtime_error("missing DWT reference fixtures in " + dir);

  std::string line;
  std::getline(sig, line);
  while (std::getline(sig, line)) {
    const auto c = split_csv_line(line);
    auto& v = ref.signals[std::stoi(c[0])];
    const auto idx = std::stoul(c[1]);
    if (v.size() <= idx) v.resize(idx + 1);
    v[idx] = std::stod(c[2]);
  }

  std::map<std::string, std::size_t> where;
  std::getline(coef, line);
  while (std::getline(coef, line)) {
    const auto c = split_csv_line(line);
    const std::string key = c[0] + "/" + c[1] + "/" + c[2];
    auto it = where.find(key);
    if (it == where.end()) {
      DwtReferenceCase rc;
      rc.signal_id = std::stoi(c[0]);
      rc.wavelet = dwt::parse_wavelet_name(c[1]);
      rc.levels = std::stoul(c[2]);
      ref.cases.push_back(std::move(rc));
      it = where.emplace(key, ref.cases.size() - 1).first;
    }
    auto& band = ref.cases[it->second].bands[c[3]];
    const auto idx = std::stoul(c[4]);
    if (band.size() <= idx) band.resize(idx + 1);
    band[idx] = std::stod(c[5]);
  }
  return ref;
}

/// Largest absolute difference between a decomposition and a reference case;
/// infinity when band shapes disagree.
inline double max_reference_error(const dwt::WaveletDecomposition& d,
                                  const DwtReferenceCase& rc) {
  double worst = 0.0;
  auto compare = [&](const std::string& name, const std::vector<double>& got) {
    const auto it = rc.bands.find(name);
    if (it == rc.bands.end() || it->second.size() != got.size()) {
      worst = std::numeric_limits<double>::infinity();
      return;
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      worst = std::max(worst, std::abs(got[i] - it->second[i]));
  };
  compare("a" + std::to_string(d.levels), d.approx);
  for (std::size_t j = 0; j < d.levels; ++j) compare("d" + std::to_string(j + 1), d.details[j]);
  if (rc.bands.size() != d.levels + 1) worst = std::numeric_limits<double>::infinity();
  return worst;
}

}  // namespace pvff::testutil
