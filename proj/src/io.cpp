#include "catsim/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace catsim {

using nlohmann::json;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool parse_double(std::string_view token, double& out) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

std::string density_matrix_to_json(const DensityMatrix& rho) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index n = 0; n < rho.dim(); ++n) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index m = 0; m < rho.dim(); ++m) {
      re_row.push_back(rho(n, m).real());
      im_row.push_back(rho(n, m).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json doc = {{"cutoff", rho.cutoff()}, {"re", std::move(re)}, {"im", std::move(im)}};
  return doc.dump() + "\n";
}

DensityMatrix density_matrix_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("density matrix JSON: ") + e.what(), 0);
  }
  if (!doc.is_object() || !doc.contains("cutoff") || !doc.contains("re") || !doc.contains("im")) {
    throw SchemaError("density matrix JSON needs cutoff, re and im");
  }
  const int cutoff = doc.at("cutoff").get<int>();
  if (cutoff < 1) throw SchemaError("density matrix JSON: cutoff must be >= 1");
  const Eigen::Index dim = cutoff + 1;
  const json& re = doc.at("re");
  const json& im = doc.at("im");
  if (!re.is_array() || !im.is_array() || Eigen::Index(re.size()) != dim ||
      Eigen::Index(im.size()) != dim) {
    throw SchemaError("density matrix JSON: re/im must have cutoff+1 rows");
  }
  CMatrix m(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    if (!re[n].is_array() || !im[n].is_array() || Eigen::Index(re[n].size()) != dim ||
        Eigen::Index(im[n].size()) != dim) {
      throw SchemaError("density matrix JSON: row " + std::to_string(n) + " has wrong length");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      m(n, k) = Complex(re[n][k].get<double>(), im[n][k].get<double>());
    }
  }
  return DensityMatrix(std::move(m));
}

void save_density_matrix(const DensityMatrix& rho, const std::filesystem::path& path) {
  write_text_file(path, density_matrix_to_json(rho));
}

DensityMatrix load_density_matrix(const std::filesystem::path& path) {
  return density_matrix_from_json(read_text_file(path));
}

void write_wigner_csv(std::ostream& out, const WignerGrid& grid) {
  out << "# basis=wigner theta=0\n";
  out << "x,p,W\n";
  for (Eigen::Index i = 0; i < grid.x_axis.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.p_axis.size(); ++j) {
      out << format_double(grid.x_axis[i]) << ',' << format_double(grid.p_axis[j]) << ','
          << format_double(grid.values(i, j)) << '\n';
    }
  }
}

void write_quad_csv(std::ostream& out, const QuadDensityMatrix& rho, std::string_view basis) {
  out << "# basis=" << basis << " theta=" << format_double(rho.theta.deg()) << '\n';
  out << "q,q',re,im\n";
  for (Eigen::Index i = 0; i < rho.axis.size(); ++i) {
    for (Eigen::Index j = 0; j < rho.axis.size(); ++j) {
      out << format_double(rho.axis[i]) << ',' << format_double(rho.axis[j]) << ','
          << format_double(rho.values(i, j).real()) << ',' << format_double(rho.values(i, j).imag())
          << '\n';
    }
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr)) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace catsim
