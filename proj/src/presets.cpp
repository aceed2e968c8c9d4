#include "hmf/presets.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hmf {

std::string data_dir() {
  if (const char* env = std::getenv("HMF_DATA_DIR")) return env;
  return std::string(HMF_SOURCE_DIR) + "/data";
}

namespace {

Rat parse_rat(const std::string& tok) {
  auto slash = tok.find('/');
  if (slash == std::string::npos) return Rat(Int(tok));
  return Rat(Int(tok.substr(0, slash)), Int(tok.substr(slash + 1)));
}

FieldElem parse_fe(std::istringstream& in) {
  std::string a, b;
  in >> a >> b;
  if (b.empty()) throw std::runtime_error("order file: truncated field element");
  return FieldElem{parse_rat(a), parse_rat(b)};
}

}  // namespace

Order read_order_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open order preset: " + path);
  long d = 0;
  FieldElem a, b;
  std::array<QuatF, 4> basis;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "d")
      ss >> d;
    else if (key == "a")
      a = parse_fe(ss);
    else if (key == "b")
      b = parse_fe(ss);
    else if (key == "basis_row") {
      if (rows >= 4) throw std::runtime_error("order file: too many basis rows");
      for (int m = 0; m < 4; m++) basis[(size_t)rows].c[(size_t)m] = parse_fe(ss);
      rows++;
    }
  }
  if (d == 0 || rows != 4) throw std::runtime_error("order file: incomplete " + path);
  QuatAlg A{RealQuadraticField::make(d), a, b};
  return Order{A, basis};
}

void write_order_file(const std::string& path, const Order& O) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write order preset: " + path);
  out << "# maximal order of (a,b / Q(sqrt d)), coordinates x y per entry on (1,i,j,k)\n";
  out << "d " << O.A.F.d << "\n";
  out << "a " << O.A.a.x.str() << " " << O.A.a.y.str() << "\n";
  out << "b " << O.A.b.x.str() << " " << O.A.b.y.str() << "\n";
  for (auto& q : O.basis) {
    out << "basis_row";
    for (auto& fe : q.c) out << " " << fe.x.str() << " " << fe.y.str();
    out << "\n";
  }
}

Order preset_order(long d) {
  Order O = read_order_file(data_dir() + "/presets/order_d" + std::to_string(d) + ".txt");
  if (O.A.F.d != d) throw std::runtime_error("preset_order: field mismatch");
  if (!fe_totally_positive(O.A.F, -O.A.a) || !fe_totally_positive(O.A.F, -O.A.b))
    throw std::runtime_error("preset_order: presentation not totally definite");
  if (!verify_maximal_order(O)) throw NotAnOrderError("preset_order: verification failed");
  return O;
}

}  // namespace hmf
