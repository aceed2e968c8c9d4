#include "hmf/emit.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace hmf {

using nlohmann::json;

void emit_jsonl(const SlopeReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("emit_jsonl: cannot write " + path);
  auto records = report.records;
  std::sort(records.begin(), records.end(), [](const SlopeRecord& a, const SlopeRecord& b) {
    return std::tie(a.weight, a.op, a.R) < std::tie(b.weight, b.op, b.R);
  });
  for (auto& rec : records)
    for (auto& p : rec.slopes.pairs) {
      json j;
      j["weight"] = rec.weight;
      j["op"] = rec.op;
      j["R"] = rec.R;
      j["slope"] = p.slope.str();
      j["mult"] = p.mult;
      j["certified"] = p.certified;
      out << j.dump() << "\n";
    }
}

SlopeReport ingest_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("ingest_jsonl: cannot open " + path);
  SlopeReport rep;
  std::string line;
  SlopeRecord* cur = nullptr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string w = j["weight"], op = j["op"];
    long R = j["R"];
    if (!cur || cur->weight != w || cur->op != op || cur->R != R) {
      rep.records.push_back({});
      cur = &rep.records.back();
      cur->weight = w;
      cur->op = op;
      cur->R = R;
    }
    std::string sl = j["slope"];
    long num, den = 1;
    auto slash = sl.find('/');
    if (slash == std::string::npos)
      num = std::stol(sl);
    else {
      num = std::stol(sl.substr(0, slash));
      den = std::stol(sl.substr(slash + 1));
    }
    cur->slopes.pairs.push_back({ExtRat(num, den), (long)j["mult"], (bool)j["certified"]});
  }
  return rep;
}

void emit_tsv(const SlopeReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("emit_tsv: cannot write " + path);
  out << "weight\top\tR\tn\tregion\tprecision\tseconds\tslopes\n";
  for (auto& rec : report.records) {
    out << rec.weight << "\t" << rec.op << "\t" << rec.R << "\t" << rec.n << "\t"
        << rec.region << "\t" << rec.precision_digits << "\t" << rec.seconds << "\t"
        << rec.slopes.str() << "\n";
  }
}

void emit_svg_grid(const PartialGrid& grid, const std::string& title, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("emit_svg_grid: cannot write " + path);
  const long cell = 48, margin = 64;
  long w = margin * 2 + cell * (long)grid.xs.size();
  long h = margin * 2 + cell * (long)grid.ys.size();
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
  out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
  for (size_t r = 0; r <= grid.ys.size(); r++)
    out << "<line x1='" << margin << "' y1='" << margin + cell * (long)r << "' x2='"
        << w - margin << "' y2='" << margin + cell * (long)r
        << "' stroke='#999' stroke-dasharray='3,3'/>\n";
  for (size_t c = 0; c <= grid.xs.size(); c++)
    out << "<line x1='" << margin + cell * (long)c << "' y1='" << margin << "' x2='"
        << margin + cell * (long)c << "' y2='" << h - margin
        << "' stroke='#999' stroke-dasharray='3,3'/>\n";
  // axis labels in exact fractions (halves/thirds as they come)
  for (size_t c = 0; c < grid.xs.size(); c++)
    out << "<text x='" << margin + cell * (long)c + cell / 2 << "' y='" << h - margin + 24
        << "' text-anchor='middle' font-size='12'>" << grid.xs[c].str() << "</text>\n";
  for (size_t r = 0; r < grid.ys.size(); r++)
    out << "<text x='" << margin - 16 << "' y='"
        << h - margin - cell * (long)r - cell / 2 + 4
        << "' text-anchor='middle' font-size='12'>" << grid.ys[r].str() << "</text>\n";
  for (size_t r = 0; r < grid.ys.size(); r++)
    for (size_t c = 0; c < grid.xs.size(); c++) {
      long m = grid.at(r, c);
      if (m == 0) continue;
      out << "<text x='" << margin + cell * (long)c + cell / 2 << "' y='"
          << h - margin - cell * (long)r - cell / 2 + 5
          << "' text-anchor='middle' font-size='14'>" << m << "</text>\n";
    }
  out << "</svg>\n";
}

void emit_report(const SlopeReport& report, const std::string& format, const std::string& dir) {
  std::filesystem::create_directories(dir);
  if (format == "jsonl")
    emit_jsonl(report, dir + "/slopes.jsonl");
  else if (format == "tsv")
    emit_tsv(report, dir + "/slopes.tsv");
  else
    throw IoFailure("emit_report: unknown format " + format);
}

}  // namespace hmf
