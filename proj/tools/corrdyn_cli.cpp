// corrdyn: render filled Julia and Multibrot sets of the correspondence
// (w - c)^q = z^p, locate Misiurewicz parameters and run similarity curves.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "corrdyn/image_io.hpp"
#include "corrdyn/pipeline.hpp"
#include "corrdyn/report_io.hpp"

namespace fs = std::filesystem;
using namespace corrdyn;

namespace {

constexpr int kExitMath = 1;
constexpr int kExitUsage = 2;

// Resolved configuration, written next to every output as an INI-style
// section of key=value lines; `corrdyn --config <file>` replays it.
class Meta {
 public:
  explicit Meta(std::string command) : command_(std::move(command)) {}

  void add(const std::string& key, std::string value) { lines_.emplace_back(key, std::move(value)); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, Complex value) { add(key, format_complex(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  std::string str() const {
    std::string out = "[" + command_ + "]\n";
    for (const auto& [key, value] : lines_) {
      if (value.empty()) continue;
      const bool quote = value.find_first_of(", ") != std::string::npos;
      out += key + "=" + (quote ? "\"" + value + "\"" : value) + "\n";
    }
    return out;
  }

  void write_beside(const fs::path& output) const { write_file_atomic(fs::path(output.string() + ".meta"), str()); }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> lines_;
};

struct EscapeFlags {
  int max_iter = 200;
  double lambda_esc = 2.0;
  double margin = 0.05;

  void attach(CLI::App* app) {
    app->add_option("--max-iter", max_iter, "Escape-time depth N")->check(CLI::Range(1, 65534));
    app->add_option("--lambda-esc", lambda_esc, "Escape-radius slope (> 1)");
    app->add_option("--margin", margin, "Relative margin added to the escape radius");
  }
  void record(Meta& meta) const {
    meta.add("max-iter", max_iter);
    meta.add("lambda-esc", lambda_esc);
    meta.add("margin", margin);
  }
};

struct Common {
  int threads = 0;
  bool supersample = false;
  bool png = false;
  std::string out;
};

void attach_render(CLI::App* app, Common& common) {
  app->add_option("--threads", common.threads, "Worker threads (0 = logical cores)")->check(CLI::NonNegativeNumber);
  app->add_flag("--supersample", common.supersample, "Sample 2x2 points per pixel");
  app->add_flag("--png", common.png, "Also write an 8-bit PNG preview");
}

void configurable(CLI::App* app) {
  app->configurable();
  app->allow_config_extras(CLI::config_extras_mode::ignore);
}

Window window_from(Complex center, double width, int px, int py) {
  Window win{center, width, px, py > 0 ? py : px};
  win.validate();
  return win;
}

void write_bitmap(const Common& common, const Bitmap& bmp, const Meta& meta) {
  const fs::path out(common.out);
  write_pgm(out, bmp);
  if (common.png) write_png(fs::path(out).replace_extension(".png"), bmp);
  meta.write_beside(out);
  std::cout << "wrote " << out.string() << " (" << bmp.width << "x" << bmp.height << ", " << bmp.inside_count()
            << " inside)\n";
}

std::optional<int> parse_auto(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, std::string("--") + name + " expects an integer or 'auto'");
}

void print_report(const MisiurewiczReport& r) {
  std::cout << "a          = " << format_complex(r.a) << "\n"
            << "preperiod  = " << r.preperiod << "\n"
            << "period     = " << r.period << "\n";
  if (r.signs) std::cout << "signs      = " << r.signs->str() << "\n";
  std::cout << "lambda     = " << format_complex(r.multiplier) << "  |lambda| = " << format_double(std::abs(r.multiplier))
            << "\n"
            << "w'         = " << format_complex(r.w_prime) << "\n"
            << "mu         = " << format_complex(r.mu) << "\n"
            << "residual   = " << format_double(r.residual) << "\n";
}

void print_curve(const char* name, const SimilarityCurve& curve) {
  std::cout << name << ": r=" << format_double(curve.r) << " pixel=" << format_double(curve.pixel) << "\n";
  for (std::size_t k = 0; k < curve.distances.size(); ++k) {
    std::cout << "  k=" << curve.scales[k] << " d=" << format_double(curve.distances[k]) << "\n";
  }
  std::cout << name << " " << (decreasing_trend(curve) ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of the correspondence (w - c)^q = z^p"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a .meta file written by an earlier run");
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  // render-julia
  struct {
    int p = 0, q = 0, px = 512, py = 0;
    std::string c, center = "0,0";
    double width = 4.0;
    EscapeFlags escape;
    Common common{0, false, false, "julia.pgm"};
  } rj;
  auto* julia = app.add_subcommand("render-julia", "Render the filled Julia set K_c");
  julia->add_option("--p", rj.p, "Exponent p")->required();
  julia->add_option("--q", rj.q, "Exponent q")->required();
  julia->add_option("--c", rj.c, "Parameter re,im")->required();
  julia->add_option("--center", rj.center, "Window centre re,im");
  julia->add_option("--width", rj.width, "Window width");
  julia->add_option("--px", rj.px, "Pixels across");
  julia->add_option("--py", rj.py, "Pixels down (default: --px)");
  julia->add_option("--out", rj.common.out, "Output PGM path");
  rj.escape.attach(julia);
  attach_render(julia, rj.common);
  configurable(julia);

  // render-multibrot
  struct {
    int p = 0, q = 0, px = 512, py = 0, magnify = 0;
    std::string center, report;
    double width = 4.0;
    EscapeFlags escape;
    Common common{0, false, false, "multibrot.pgm"};
  } rm;
  auto* multibrot = app.add_subcommand("render-multibrot", "Render the Multibrot set M_{p,q}");
  multibrot->add_option("--p", rm.p, "Exponent p");
  multibrot->add_option("--q", rm.q, "Exponent q");
  multibrot->add_option("--center", rm.center, "Window centre re,im (default: report parameter or 0,0)");
  multibrot->add_option("--width", rm.width, "Window width before magnification");
  multibrot->add_option("--px", rm.px, "Pixels across");
  multibrot->add_option("--py", rm.py, "Pixels down (default: --px)");
  multibrot->add_option("--magnify", rm.magnify, "Divide the width by |lambda|^k (needs --report)")
      ->check(CLI::NonNegativeNumber);
  multibrot->add_option("--report", rm.report, "Misiurewicz report file")->check(CLI::ExistingFile);
  multibrot->add_option("--out", rm.common.out, "Output PGM path");
  rm.escape.attach(multibrot);
  attach_render(multibrot, rm.common);
  configurable(multibrot);

  // find-misiurewicz
  struct {
    int p = 4, q = 2;
    std::string signs, preperiod = "auto", period = "auto", guess, out = "misiurewicz.report";
    int max_preperiod = 8, max_period = 4;
  } fm;
  auto* find = app.add_subcommand("find-misiurewicz", "Locate and validate a Misiurewicz parameter");
  find->add_option("--p", fm.p, "Exponent p");
  find->add_option("--q", fm.q, "Exponent q");
  find->add_option("--signs", fm.signs, "Sign sequence over {+,-} for (4,2), length preperiod + period - 1");
  find->add_option("--preperiod", fm.preperiod, "Preperiod (>= 2) or 'auto'");
  find->add_option("--period", fm.period, "Period (>= 1) or 'auto'");
  find->add_option("--guess", fm.guess, "Initial parameter re,im")->required();
  find->add_option("--max-preperiod", fm.max_preperiod, "Search bound for 'auto'");
  find->add_option("--max-period", fm.max_period, "Search bound for 'auto'");
  find->add_option("--out", fm.out, "Report output path");
  configurable(find);

  // similarity
  struct {
    std::string report, out = "similarity", mu_override;
    int k_max = 3, px = 1024, threads = 0, base_depth = 0;
    double r = 0.0;
  } sm;
  auto* similarity = app.add_subcommand("similarity", "Self-similarity and Julia-vs-Multibrot distance curves");
  similarity->add_option("--report", sm.report, "Misiurewicz report file")->required()->check(CLI::ExistingFile);
  similarity->add_option("--k-max", sm.k_max, "Last magnification index (curves have k = 0..k-max)")
      ->check(CLI::NonNegativeNumber);
  similarity->add_option("--px", sm.px, "Pixels across each per-level window")->check(CLI::Range(16, 8192));
  similarity->add_option("--r", sm.r, "Truncation radius (0 = default)")->check(CLI::NonNegativeNumber);
  similarity->add_option("--base-depth", sm.base_depth, "Level-0 escape depth (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  similarity->add_option("--mu-override", sm.mu_override, "Replace the report's mu (re,im or real)");
  similarity->add_option("--threads", sm.threads, "Worker threads (0 = logical cores)")
      ->check(CLI::NonNegativeNumber);
  similarity->add_option("--out", sm.out, "Output prefix for <out>.self.csv and <out>.jm.csv");
  configurable(similarity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*julia) {
      const Exponent exp(rj.p, rj.q);
      const Complex c = parse_complex(rj.c);
      const Window win = window_from(parse_complex(rj.center), rj.width, rj.px, rj.py);
      const EscapeConfig cfg = make_escape_config(exp, std::abs(c), rj.escape.max_iter, rj.escape.lambda_esc,
                                                  rj.escape.margin);
      const Bitmap bmp = render_julia(c, exp, win, cfg, RenderOptions{rj.common.threads, 64, rj.common.supersample});
      Meta meta("render-julia");
      meta.add("p", rj.p);
      meta.add("q", rj.q);
      meta.add("c", c);
      meta.add("center", win.center);
      meta.add("width", win.width);
      meta.add("px", win.pixels_x);
      meta.add("py", win.pixels_y);
      rj.escape.record(meta);
      meta.add("escape-radius", cfg.radius);
      meta.add("supersample", rj.common.supersample);
      meta.add("threads", rj.common.threads);
      meta.add("out", rj.common.out);
      write_bitmap(rj.common, bmp, meta);
    } else if (*multibrot) {
      std::optional<MisiurewiczReport> report;
      if (!rm.report.empty()) report = read_report(rm.report);
      if (rm.magnify > 0 && !report) throw Error(ErrorCode::InvalidArgument, "--magnify needs --report");
      const Exponent exp = report && rm.p == 0 && rm.q == 0 ? report->exponent : Exponent(rm.p, rm.q);
      const Complex center = !rm.center.empty() ? parse_complex(rm.center) : report ? report->a : Complex{};
      const double width =
          rm.magnify > 0 ? rm.width * std::pow(std::abs(report->multiplier), -rm.magnify) : rm.width;
      const Window win = window_from(center, width, rm.px, rm.py);
      const EscapeConfig proto =
          make_escape_config(exp, 0.0, rm.escape.max_iter, rm.escape.lambda_esc, rm.escape.margin);
      const Bitmap bmp = render_multibrot(exp, win, proto, RenderOptions{rm.common.threads, 64, rm.common.supersample});
      Meta meta("render-multibrot");
      meta.add("p", exp.p());
      meta.add("q", exp.q());
      meta.add("center", win.center);
      meta.add("width", rm.width);
      meta.add("magnify", rm.magnify);
      meta.add("report", rm.report);
      meta.add("effective-width", win.width);
      meta.add("px", win.pixels_x);
      meta.add("py", win.pixels_y);
      rm.escape.record(meta);
      meta.add("supersample", rm.common.supersample);
      meta.add("threads", rm.common.threads);
      meta.add("out", rm.common.out);
      write_bitmap(rm.common, bmp, meta);
    } else if (*find) {
      const Exponent exp(fm.p, fm.q);
      const Complex guess = parse_complex(fm.guess);
      const auto pre = parse_auto(fm.preperiod, "preperiod");
      const auto per = parse_auto(fm.period, "period");
      MisiurewiczReport report;
      if (!fm.signs.empty()) {
        if (!(exp == Exponent{4, 2})) throw Error(ErrorCode::InvalidArgument, "--signs applies to (4,2) only");
        if (!pre || !per) throw Error(ErrorCode::InvalidArgument, "--signs needs explicit --preperiod and --period");
        report = solve_misiurewicz_42(SignSequence::parse(fm.signs, *pre, *per), guess);
      } else {
        const EscapeConfig cfg = make_escape_config(exp, std::abs(guess));
        if (pre && per) {
          report = refine_misiurewicz_numeric(exp, guess, *pre, *per, cfg);
        } else if (!pre && !per) {
          report = refine_misiurewicz_auto(exp, guess, cfg, fm.max_preperiod, fm.max_period);
        } else {
          throw Error(ErrorCode::InvalidArgument, "--preperiod and --period must both be integers or both 'auto'");
        }
      }
      print_report(report);
      write_report(fm.out, report);
      Meta meta("find-misiurewicz");
      meta.add("p", fm.p);
      meta.add("q", fm.q);
      meta.add("signs", fm.signs);
      meta.add("preperiod", fm.preperiod);
      meta.add("period", fm.period);
      meta.add("guess", guess);
      meta.add("max-preperiod", fm.max_preperiod);
      meta.add("max-period", fm.max_period);
      meta.add("out", fm.out);
      meta.write_beside(fm.out);
      std::cout << "wrote " << fm.out << "\n";
    } else if (*similarity) {
      SimilarityJob job;
      job.report = read_report(sm.report);
      job.k_max = sm.k_max + 1;
      job.pixels = sm.px;
      job.r = sm.r;
      job.base_depth = sm.base_depth;
      if (!sm.mu_override.empty()) {
        job.mu_override = sm.mu_override.find(',') == std::string::npos ? Complex{parse_double(sm.mu_override), 0.0}
                                                                          : parse_complex(sm.mu_override);
      }
      job.render.threads = sm.threads;
      job.hausdorff.threads = sm.threads;
      const SimilarityResult result = run_similarity(job);

      const fs::path self_csv(sm.out + ".self.csv");
      const fs::path jm_csv(sm.out + ".jm.csv");
      write_file_atomic(self_csv, serialize_curve_csv(result.self_curve));
      write_file_atomic(jm_csv, serialize_curve_csv(result.julia_vs_multibrot));
      Meta meta("similarity");
      meta.add("report", sm.report);
      meta.add("a", job.report.a);
      meta.add("k-max", sm.k_max);
      meta.add("px", sm.px);
      meta.add("r", result.r);
      meta.add("base-depth", result.base_depth);
      meta.add("mu", result.mu);
      meta.add("mu-override", sm.mu_override);
      meta.add("threads", sm.threads);
      meta.add("out", sm.out);
      write_file_atomic(fs::path(sm.out + ".meta"), meta.str());

      print_curve("self_similarity", result.self_curve);
      print_curve("julia_vs_multibrot", result.julia_vs_multibrot);
      const bool pass = decreasing_trend(result.self_curve) && decreasing_trend(result.julia_vs_multibrot);
      std::cout << "wrote " << self_csv.string() << " " << jm_csv.string() << "\n"
                << "summary " << (pass ? "PASS" : "FAIL") << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitMath;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMath;
  }
  return 0;
}
