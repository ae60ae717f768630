#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/sbm_kernel.hpp"

namespace spectral_frechet {

// Kernel document: JSON object with fields rho (real), s (array), p (array)
// and q (real for a shared cross density, or c x c array).

inline void write_kernel(const SbmKernel& k, std::ostream& out) {
  nlohmann::json doc;
  doc["rho"] = k.rho();
  doc["s"] = std::vector<double>(k.s().data(), k.s().data() + k.s().size());
  doc["p"] = std::vector<double>(k.p().data(), k.p().data() + k.p().size());
  const int c = k.communities();
  bool uniform = true;
  const double q0 = c > 1 ? k.q_matrix()(0, 1) : 0.0;
  for (int i = 0; i < c && uniform; ++i)
    for (int j = 0; j < c && uniform; ++j)
      if (i != j) uniform = k.q_matrix()(i, j) == q0;
  if (uniform) {
    doc["q"] = q0;
  } else {
    std::vector<std::vector<double>> rows(c, std::vector<double>(c));
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) rows[i][j] = k.q_matrix()(i, j);
    doc["q"] = rows;
  }
  out << doc.dump(2) << "\n";
}

inline SbmKernel read_kernel(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("kernel document parse error: ") + e.what());
  }
  try {
    const double rho = doc.at("rho").get<double>();
    const auto sv = doc.at("s").get<std::vector<double>>();
    const auto pv = doc.at("p").get<std::vector<double>>();
    const int c = static_cast<int>(sv.size());
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(sv.data(), c);
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pv.data(), pv.size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(c, c);
    const auto& qdoc = doc.at("q");
    if (qdoc.is_number()) {
      q.setConstant(qdoc.get<double>());
      q.diagonal().setZero();
    } else {
      const auto rows = qdoc.get<std::vector<std::vector<double>>>();
      if (static_cast<int>(rows.size()) != c)
        throw DataError("kernel document: q has wrong shape");
      for (int i = 0; i < c; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
          throw DataError("kernel document: q has wrong shape");
        for (int j = 0; j < c; ++j) q(i, j) = rows[i][j];
      }
    }
    return SbmKernel(rho, std::move(s), std::move(p), std::move(q));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("kernel document: ") + e.what());
  }
}

inline void write_kernel_file(const SbmKernel& k, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  write_kernel(k, out);
}

inline SbmKernel read_kernel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open kernel file: " + path.string());
  return read_kernel(in);
}

}  // namespace spectral_frechet
