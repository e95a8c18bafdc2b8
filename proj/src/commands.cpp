#include "ocdeepiv/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ocdeepiv/csv.hpp"
#include "ocdeepiv/features.hpp"
#include "ocdeepiv/gradcheck.hpp"

namespace ocdeepiv {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("unwritable path " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

struct ManifestBuilder {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::vector<std::string> files;

  void write(const ExperimentConfig& cfg, const std::string& out_dir) const {
    std::ostringstream m;
    for (const auto& [k, v] : cfg.echo()) m << "config." << k << "=" << v << "\n";
    m << "seed=" << cfg.dgp.seed << "\n";
    for (const auto& f : files)
      m << "file." << f << ".digest=" << file_digest((fs::path(out_dir) / f).string())
        << "\n";
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", wall);
    m << "wall_time_s=" << buf << "\n";
    write_text((fs::path(out_dir) / "manifest.txt").string(), m.str());
  }
};

std::string losses_to_csv(const std::vector<LossRecord>& records, int epochs_per_stage,
                          int switch_epoch) {
  std::ostringstream out;
  out << "epoch,total,mse,ortho\n";
  for (const auto& rec : records) {
    const int in_stage =
        epochs_per_stage > 0 ? (rec.epoch - 1) % epochs_per_stage + 1 : rec.epoch;
    const bool pre_switch = in_stage <= switch_epoch;
    out << rec.epoch << "," << format_double(rec.total) << "," << format_double(rec.mse)
        << ",";
    if (!pre_switch) out << format_double(rec.ortho);
    out << "\n";
  }
  return out.str();
}

std::string dataset_to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "z1,z2,z3,x1,x2,t";
  if (ds.Y) out << ",y";
  out << ",theta_true\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) out << format_double(ds.Z(i, j)) << ",";
    out << format_double(ds.X(i, 0)) << "," << format_double(ds.X(i, 1)) << ","
        << format_double(ds.T(i, 0));
    if (ds.Y) out << "," << format_double((*ds.Y)(i, 0));
    out << "," << format_double(ds.theta_true(i, 0)) << "\n";
  }
  return out.str();
}

// ---------- SVG rendering ----------

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string svg_chart(const std::vector<Series>& series, const std::string& title,
                      std::optional<double> vline_x = std::nullopt) {
  const double width = 900, height = 450;
  const double ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymin) << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"11\">" << fmt2(ymin) << "</text>\n";
  svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymax) << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"11\">" << fmt2(ymax) << "</text>\n";
  svg << "<text x=\"" << px(xmin) << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt2(xmin) << "</text>\n";
  svg << "<text x=\"" << px(xmax) << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt2(xmax) << "</text>\n";
  if (vline_x && *vline_x >= xmin && *vline_x <= xmax) {
    svg << "<line x1=\"" << fmt2(px(*vline_x)) << "\" y1=\"" << mt << "\" x2=\""
        << fmt2(px(*vline_x)) << "\" y2=\"" << height - mb
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  double legend_y = mt + 8;
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" "
        << "points=\"";
    for (const auto& [x, y] : s.points) svg << fmt2(px(x)) << "," << fmt2(py(y)) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"" << width - mr - 180 << "\" y=\"" << legend_y
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color << "\">"
        << s.label << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "kind,status,mse_raw,mse_raw_std,mse_smoothed,mse_smoothed_std,wall_time_s\n";
  for (const auto& row : rows) {
    out << to_string(row.kind) << ",";
    if (!row.ok) {
      out << row.error << ",,,,,\n";
      continue;
    }
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", row.wall_time_s);
    out << "ok," << format_double(row.mse_raw_mean) << ","
        << format_double(row.mse_raw_std) << "," << format_double(row.mse_smoothed_mean)
        << "," << format_double(row.mse_smoothed_std) << "," << wall << "\n";
  }
  return out.str();
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path + " for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void run_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  ManifestBuilder manifest;
  ensure_dir(out_dir);
  Dataset ds = cfg.generate_dataset(cfg.dgp.seed);
  write_text((fs::path(out_dir) / "dataset.csv").string(), dataset_to_csv(ds));
  manifest.files = {"dataset.csv"};
  manifest.write(cfg, out_dir);
}

void run_train(const ExperimentConfig& cfg, const std::string& out_dir) {
  ManifestBuilder manifest;
  ensure_dir(out_dir);
  Dataset ds = cfg.generate_dataset(cfg.dgp.seed);

  const std::string losses_path = (fs::path(out_dir) / "losses.csv").string();
  std::vector<LossRecord> progress;
  Matrix theta_hat;
  try {
    if (cfg.theta_mode == ThetaMode::CodeFaithful) {
      theta_hat = train_code_faithful(ds, cfg.train, &progress).theta_hat;
    } else {
      theta_hat = estimate_theta_two_stage(ds, cfg.train, &progress).theta_hat;
    }
  } catch (const TrainError&) {
    write_text(losses_path,
               losses_to_csv(progress, cfg.train.epochs, cfg.train.switch_epoch));
    throw;
  }
  write_text(losses_path,
             losses_to_csv(progress, cfg.train.epochs, cfg.train.switch_epoch));

  std::vector<double> raw(theta_hat.data.begin(), theta_hat.data.end());
  std::vector<double> smooth =
      moving_average(raw, static_cast<std::size_t>(cfg.smoothing_window));
  std::ostringstream th;
  th << "index,theta_true,theta_hat,theta_smooth\n";
  for (std::size_t i = 0; i < raw.size(); ++i)
    th << i << "," << format_double(ds.theta_true(i, 0)) << "," << format_double(raw[i])
       << "," << format_double(smooth[i]) << "\n";
  write_text((fs::path(out_dir) / "theta.csv").string(), th.str());

  manifest.files = {"losses.csv", "theta.csv"};
  manifest.write(cfg, out_dir);

  if (cfg.plot) {
    run_plot((fs::path(out_dir) / "theta.csv").string(), losses_path, out_dir);
  }
}

void run_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
  ManifestBuilder manifest;
  ensure_dir(out_dir);

  unsigned max_threads = 1;
  if (const char* env = std::getenv("OCDEEPIV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) max_threads = static_cast<unsigned>(v);
  }

  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < cfg.replications; ++r)
    seeds.push_back(cfg.dgp.seed + static_cast<std::uint64_t>(r));

  auto rows = compare([&](std::uint64_t seed) { return cfg.generate_dataset(seed); },
                      cfg.estimators, cfg.train, seeds, cfg.smoothing_window,
                      max_threads);
  write_text((fs::path(out_dir) / "comparison.csv").string(), compare_to_csv(rows));
  manifest.files = {"comparison.csv"};
  manifest.write(cfg, out_dir);
}

bool run_gradcheck(const std::string& scope, double tol) {
  bool all_pass = true;
  for (const auto& res : run_grad_checks(scope, tol)) {
    std::printf("%-16s max_rel_err=%.3e %s\n", res.name.c_str(), res.max_rel_err,
                res.pass ? "PASS" : "FAIL");
    all_pass = all_pass && res.pass;
  }
  return all_pass;
}

void run_plot(const std::string& theta_csv, const std::string& losses_csv,
              const std::string& out_dir) {
  ensure_dir(out_dir);

  CsvTable theta = read_csv(theta_csv);
  const std::size_t c_true = theta.column("theta_true");
  const std::size_t c_hat = theta.column("theta_hat");
  const std::size_t c_smooth = theta.column("theta_smooth");
  const std::size_t limit = std::min<std::size_t>(theta.rows.size(), 500);
  Series s_true{"true", "#1f77b4", {}}, s_hat{"estimated", "#ff7f0e", {}},
      s_smooth{"smoothed", "#2ca02c", {}};
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& row = theta.rows[i];
    const double x = static_cast<double>(i);
    s_true.points.emplace_back(x, parse_field(row[c_true], theta_csv, i + 2));
    s_hat.points.emplace_back(x, parse_field(row[c_hat], theta_csv, i + 2));
    s_smooth.points.emplace_back(x, parse_field(row[c_smooth], theta_csv, i + 2));
  }
  write_text((fs::path(out_dir) / "theta_plot.svg").string(),
             svg_chart({s_true, s_hat, s_smooth}, "True vs estimated effect"));

  CsvTable losses = read_csv(losses_csv);
  const std::size_t c_epoch = losses.column("epoch");
  const std::size_t c_total = losses.column("total");
  const std::size_t c_mse = losses.column("mse");
  const std::size_t c_ortho = losses.column("ortho");
  Series s_total{"total", "#1f77b4", {}}, s_mse{"mse", "#ff7f0e", {}},
      s_ortho{"ortho", "#2ca02c", {}};
  std::optional<double> switch_x;
  for (std::size_t i = 0; i < losses.rows.size(); ++i) {
    const auto& row = losses.rows[i];
    const double e = parse_field(row[c_epoch], losses_csv, i + 2);
    s_total.points.emplace_back(e, parse_field(row[c_total], losses_csv, i + 2));
    s_mse.points.emplace_back(e, parse_field(row[c_mse], losses_csv, i + 2));
    if (!row[c_ortho].empty()) {
      s_ortho.points.emplace_back(e, parse_field(row[c_ortho], losses_csv, i + 2));
      if (!switch_x) switch_x = e;
    }
  }
  write_text((fs::path(out_dir) / "losses_plot.svg").string(),
             svg_chart({s_total, s_mse, s_ortho}, "Training losses", switch_x));
}

}  // namespace ocdeepiv
