#include "nlint/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "nlint/errors.hpp"

namespace nlint {

namespace {

constexpr const char* kSections[] = {"crystal", "pump",  "geometry", "sample",
                                     "scan",    "grid",  "tasks",    "output"};

constexpr double kDefaultZ1 = 100.0;
constexpr double kDefaultZ2 = 50.0;
constexpr double kDefaultZp1 = 10.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

// Key-value pairs of one section, consumed by the section readers. Anything
// left unread at the end is an unknown key.
class Section {
 public:
  Section() = default;
  Section(std::string name, int line) : name_(std::move(name)), line_(line) {}

  void add(const std::string& key, std::string value, int line) {
    if (entries_.count(key))
      fail(ErrorKind::Parse, "line " + std::to_string(line) + ": duplicate key '" + key +
                                 "' in [" + name_ + "]");
    entries_[key] = Entry{std::move(value), line};
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::optional<double> number(const std::string& key) {
    const auto raw = text(key);
    if (!raw) return std::nullopt;
    return to_number(key, *raw);
  }

  double number_or(const std::string& key, double fallback) {
    return number(key).value_or(fallback);
  }

  double required(const std::string& key) {
    const auto v = number(key);
    if (!v) fail(ErrorKind::Validation, path(key) + " is required");
    return *v;
  }

  std::size_t count_or(const std::string& key, std::size_t fallback) {
    const auto v = number(key);
    if (!v) return fallback;
    if (!(*v >= 0.0) || *v != std::floor(*v) || *v > 1e9)
      fail(ErrorKind::Validation, path(key) + " must be a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  bool flag_or(const std::string& key, bool fallback) {
    const auto raw = text(key);
    if (!raw) return fallback;
    if (*raw == "true" || *raw == "yes" || *raw == "1") return true;
    if (*raw == "false" || *raw == "no" || *raw == "0") return false;
    fail(ErrorKind::Parse, "line " + std::to_string(line_of(key)) + ": " + path(key) +
                               " expects true or false, got '" + *raw + "'");
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (const auto raw = text(key))
      for (const auto& item : split_list(*raw)) out.push_back(to_number(key, item));
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_)
      if (!entry.used)
        fail(ErrorKind::Validation, "line " + std::to_string(entry.line) + ": unknown key '" +
                                        key + "' in [" + name_ + "]");
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }
  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? line_ : it->second.line;
  }

 private:
  double to_number(const std::string& key, const std::string& raw) const {
    double v = 0.0;
    const char* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
      fail(ErrorKind::Parse, "line " + std::to_string(line_of(key)) + ": " + path(key) +
                                 " expects a number, got '" + raw + "'");
    return v;
  }

  std::string name_;
  int line_ = 0;
  std::map<std::string, Entry> entries_;
};

std::map<std::string, Section> tokenize(std::string_view text) {
  std::map<std::string, Section> sections;
  Section* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Parse, where + "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections))
        fail(ErrorKind::Parse, where + "unknown section [" + name + "]");
      if (sections.count(name)) fail(ErrorKind::Parse, where + "duplicate section [" + name + "]");
      current = &sections.emplace(name, Section(name, line_no)).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(ErrorKind::Parse, where + "missing key before '='");
    if (value.empty()) fail(ErrorKind::Parse, where + "missing value for '" + key + "'");
    if (!current) fail(ErrorKind::Parse, where + "'" + key + "' appears before any section");
    current->add(key, std::move(value), line_no);
  }
  return sections;
}

// Rethrows constructor errors as validation errors under a field path.
template <class F>
auto scoped(const std::string& scope, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    std::string msg = e.what();
    if (msg.rfind(scope, 0) != 0) msg = scope + ": " + msg;
    fail(ErrorKind::Validation, msg);
  }
}

CrystalFields read_crystal(Section& s) {
  CrystalFields f;
  const auto preset = s.text("preset");
  if (preset) {
    if (*preset != "mgo-ln-532")
      fail(ErrorKind::Validation, "crystal.preset: unknown preset '" + *preset + "'");
    f = CrystalParams::mgo_ln_532(1.0).fields();
    f.length_mm = s.required("length_mm");
    f.D = s.number_or("D_fs_per_mm", f.D);
    f.D_plus = s.number_or("D_plus_fs_per_mm", f.D_plus);
    f.N_i = s.number_or("N_i_fs_per_mm", f.N_i);
    f.lambda_p_nm = s.number_or("lambda_p_nm", f.lambda_p_nm);
    f.lambda_s_nm = s.number_or("lambda_s_nm", f.lambda_s_nm);
    f.lambda_i_nm = s.number_or("lambda_i_nm", f.lambda_i_nm);
  } else {
    f.length_mm = s.required("length_mm");
    f.D = s.required("D_fs_per_mm");
    f.D_plus = s.number_or("D_plus_fs_per_mm", 0.0);
    f.N_i = s.required("N_i_fs_per_mm");
    f.lambda_p_nm = s.required("lambda_p_nm");
    f.lambda_s_nm = s.required("lambda_s_nm");
    f.lambda_i_nm = s.required("lambda_i_nm");
    f.idler_phase_index = 0.0;
  }
  f.sigma = s.number_or("sigma", f.sigma);
  f.idler_phase_index = s.number_or("idler_phase_index", f.idler_phase_index);
  scoped("crystal", [&] { return CrystalParams(f); });
  return f;
}

double read_pump(Section& s) {
  const auto fs = s.number("T0_fs");
  const auto ps = s.number("T0_ps");
  if (fs && ps) fail(ErrorKind::Validation, "pump: give either T0_fs or T0_ps, not both");
  if (!fs && !ps) fail(ErrorKind::Validation, "pump.T0_fs is required (or pump.T0_ps)");
  const double T0 = fs ? *fs : PumpPulse::from_ps(*ps).T0();
  scoped("pump", [&] { return PumpPulse(T0); });
  return T0;
}

SampleSpec read_sample(Section& s, const CrystalParams& crystal) {
  SampleSpec spec;
  const auto preset = s.text("preset");
  std::string type = s.text("type").value_or(preset ? "bilayer" : "mirror");
  double n_ambient = 0.0, n_layer = 0.0, n_substrate = 0.0, thickness = 0.0;
  if (preset) {
    if (*preset != "glass-slab-20um")
      fail(ErrorKind::Validation, "sample.preset: unknown preset '" + *preset + "'");
    if (type != "bilayer") fail(ErrorKind::Validation, "sample.type: preset " + *preset + " is a bilayer");
    n_ambient = 1.0;
    n_layer = 1.5;
    n_substrate = 1.3;
    thickness = 20.0;
  }

  if (type == "mirror") {
    spec.kind = SampleKind::Mirror;
  } else if (type == "uniform") {
    spec.kind = SampleKind::Uniform;
    spec.r = {s.number_or("r_re", 1.0), s.number_or("r_im", 0.0)};
  } else if (type == "bilayer") {
    spec.kind = SampleKind::Bilayer;
    const bool explicit_r = s.has("r0") || s.has("r1");
    const bool fresnel = preset || s.has("n_ambient") || s.has("n_layer") || s.has("n_substrate");
    if (explicit_r && fresnel)
      fail(ErrorKind::Validation, "sample: give either r0/r1 or Fresnel indices, not both");
    if (explicit_r) {
      spec.layers.r0 = s.required("r0");
      spec.layers.r1 = s.required("r1");
      spec.layers.thickness_um = s.required("thickness_um");
      spec.layers.layer_index = s.required("layer_index");
      spec.layers.carrier_omega = crystal.omega_i0();
    } else {
      if (preset) {
        n_ambient = s.number_or("n_ambient", n_ambient);
        n_layer = s.number_or("n_layer", n_layer);
        n_substrate = s.number_or("n_substrate", n_substrate);
        thickness = s.number_or("thickness_um", thickness);
      } else {
        n_ambient = s.required("n_ambient");
        n_layer = s.required("n_layer");
        n_substrate = s.required("n_substrate");
        thickness = s.required("thickness_um");
      }
      spec.layers = scoped("sample", [&] {
        return BilayerSample::from_fresnel(n_ambient, n_layer, n_substrate, thickness,
                                           crystal.omega_i0());
      });
    }
  } else if (type == "tabulated") {
    spec.kind = SampleKind::Tabulated;
    spec.table.omega = s.numbers("omega_rad_per_fs");
    const auto re = s.numbers("r_re");
    auto im = s.numbers("r_im");
    if (im.empty()) im.assign(re.size(), 0.0);
    if (re.size() != spec.table.omega.size() || im.size() != re.size())
      fail(ErrorKind::Validation,
           "sample: omega_rad_per_fs, r_re and r_im must list the same number of values");
    for (std::size_t k = 0; k < re.size(); ++k) spec.table.r.emplace_back(re[k], im[k]);
  } else {
    fail(ErrorKind::Parse, "line " + std::to_string(s.line_of("type")) +
                               ": sample.type must be mirror, uniform, bilayer or tabulated");
  }
  scoped("sample", [&] { return spec.model(); });
  return spec;
}

ScanSpec read_scan(Section& s) {
  ScanSpec scan;
  const std::string range = s.text("range").value_or("auto");
  if (range != "auto" && range != "explicit")
    fail(ErrorKind::Validation, "scan.range must be auto or explicit");
  scan.automatic = range == "auto";
  if (!scan.automatic) {
    scan.start_mm = s.required("start_mm");
    scan.stop_mm = s.required("stop_mm");
    if (!(scan.stop_mm > scan.start_mm))
      fail(ErrorKind::Validation, "scan.stop_mm must exceed scan.start_mm");
  }
  scan.points = s.count_or("points", scan.points);
  if (scan.points < 3) fail(ErrorKind::Validation, "scan.points must be at least 3");
  scan.fringes = s.flag_or("fringes", scan.fringes);
  return scan;
}

GridSpec read_grid(Section& s) {
  GridSpec g;
  g.points = s.count_or("points", g.points);
  if (g.points < 256) fail(ErrorKind::Validation, "grid.points must be at least 256");
  const std::string kernel = s.text("kernel").value_or("exact");
  if (kernel == "exact") {
    g.kernel = Kernel::Exact;
  } else if (kernel == "gaussian") {
    g.kernel = Kernel::Gaussian;
  } else {
    fail(ErrorKind::Validation, "grid.kernel must be exact or gaussian");
  }
  auto& q = g.quadrature;
  q.pump_extent = s.number_or("pump_extent", q.pump_extent);
  q.pump_nodes = s.count_or("pump_nodes", q.pump_nodes);
  q.mismatch_extent = s.number_or("mismatch_extent", q.mismatch_extent);
  q.mismatch_step = s.number_or("mismatch_step", q.mismatch_step);
  if (!(q.pump_extent > 0.0)) fail(ErrorKind::Validation, "grid.pump_extent must be positive");
  if (q.pump_nodes < 3) fail(ErrorKind::Validation, "grid.pump_nodes must be at least 3");
  if (!(q.mismatch_extent > 0.0)) fail(ErrorKind::Validation, "grid.mismatch_extent must be positive");
  if (!(q.mismatch_step > 0.0)) fail(ErrorKind::Validation, "grid.mismatch_step must be positive");
  return g;
}

std::vector<Task> read_tasks(Section& s) {
  const auto raw = s.text("run");
  if (!raw) fail(ErrorKind::Validation, "tasks.run must list at least one task");
  std::vector<Task> tasks;
  for (const auto& name : split_list(*raw)) {
    const Task t = scoped("tasks.run", [&] { return parse_task(name); });
    if (std::find(tasks.begin(), tasks.end(), t) != tasks.end())
      fail(ErrorKind::Validation, "tasks.run lists '" + name + "' twice");
    tasks.push_back(t);
  }
  if (tasks.empty()) fail(ErrorKind::Validation, "tasks.run must list at least one task");
  return tasks;
}

OutputSpec read_output(Section& s) {
  OutputSpec out;
  out.dir = s.text("dir").value_or(out.dir);
  if (const auto f = s.text("format")) out.format = scoped("output.format", [&] { return parse_format(*f); });
  out.prefix = s.text("prefix").value_or("");
  if (out.prefix.find_first_of("/\\") != std::string::npos)
    fail(ErrorKind::Validation, "output.prefix must not contain path separators");
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + num(v[k]);
  return out;
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::JointSpectrum: return "joint_spectrum";
    case Task::Schmidt: return "schmidt";
    case Task::G1Scan: return "g1_scan";
    case Task::OctScan: return "oct_scan";
    case Task::Spectrum: return "spectrum";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (Task t : {Task::JointSpectrum, Task::Schmidt, Task::G1Scan, Task::OctScan, Task::Spectrum})
    if (to_string(t) == name) return t;
  fail(ErrorKind::Validation, "unknown task '" + std::string(name) +
                                  "' (expected joint_spectrum, schmidt, g1_scan, oct_scan or spectrum)");
}

SampleModel SampleSpec::model() const {
  switch (kind) {
    case SampleKind::Mirror: return SampleModel::mirror();
    case SampleKind::Uniform: return SampleModel::uniform(r);
    case SampleKind::Bilayer: return SampleModel::bilayer(layers);
    case SampleKind::Tabulated: return SampleModel::tabulated(table);
  }
  return SampleModel::mirror();
}

Scenario parse_scenario(std::string_view text) {
  auto sections = tokenize(text);
  for (const char* required : {"crystal", "pump", "tasks"})
    if (!sections.count(required))
      fail(ErrorKind::Validation, std::string("missing required section [") + required + "]");
  for (const char* name : kSections) sections.try_emplace(name, Section(name, 0));

  Scenario sc;
  sc.crystal = read_crystal(sections["crystal"]);
  const CrystalParams crystal(sc.crystal);
  sc.T0_fs = read_pump(sections["pump"]);

  Section& geo = sections["geometry"];
  sc.synchronize = geo.flag_or("synchronize", true);
  sc.geometry.z1 = geo.number_or("z1_mm", kDefaultZ1);
  sc.geometry.z2 = geo.number_or("z2_mm", kDefaultZ2);
  sc.geometry.zp1 = geo.number_or("zp1_mm", kDefaultZp1);
  if (sc.synchronize) {
    if (geo.has("zp2_mm"))
      fail(ErrorKind::Validation, "geometry.zp2_mm conflicts with synchronize = true");
    sc.geometry = synchronize_pump_path(sc.geometry, crystal);
  } else {
    sc.geometry.zp2 = geo.required("zp2_mm");
  }
  sc.geometry = geometry_at_delta_z(sc.geometry, crystal, 0.0);
  scoped("geometry", [&] {
    sc.geometry.validate();
    return 0;
  });

  sc.sample = read_sample(sections["sample"], crystal);
  sc.scan = read_scan(sections["scan"]);
  sc.grid = read_grid(sections["grid"]);
  sc.tasks = read_tasks(sections["tasks"]);
  sc.output = read_output(sections["output"]);

  for (const auto& [name, section] : sections) section.reject_unused();
  return sc;
}

std::string render_scenario(const Scenario& sc) {
  std::ostringstream o;
  const CrystalFields& c = sc.crystal;
  o << "[crystal]\n"
    << "length_mm = " << num(c.length_mm) << '\n'
    << "D_fs_per_mm = " << num(c.D) << '\n'
    << "D_plus_fs_per_mm = " << num(c.D_plus) << '\n'
    << "N_i_fs_per_mm = " << num(c.N_i) << '\n'
    << "lambda_p_nm = " << num(c.lambda_p_nm) << '\n'
    << "lambda_s_nm = " << num(c.lambda_s_nm) << '\n'
    << "lambda_i_nm = " << num(c.lambda_i_nm) << '\n'
    << "sigma = " << num(c.sigma) << '\n'
    << "idler_phase_index = " << num(c.idler_phase_index) << "\n\n";

  o << "[pump]\nT0_fs = " << num(sc.T0_fs) << "\n\n";

  o << "[geometry]\n"
    << "synchronize = " << (sc.synchronize ? "true" : "false") << '\n'
    << "z1_mm = " << num(sc.geometry.z1) << '\n'
    << "z2_mm = " << num(sc.geometry.z2) << '\n'
    << "zp1_mm = " << num(sc.geometry.zp1) << '\n';
  if (!sc.synchronize) o << "zp2_mm = " << num(sc.geometry.zp2) << '\n';
  o << '\n';

  o << "[sample]\n";
  switch (sc.sample.kind) {
    case SampleKind::Mirror:
      o << "type = mirror\n";
      break;
    case SampleKind::Uniform:
      o << "type = uniform\nr_re = " << num(sc.sample.r.real()) << "\nr_im = " << num(sc.sample.r.imag())
        << '\n';
      break;
    case SampleKind::Bilayer: {
      const BilayerSample& b = sc.sample.layers;
      o << "type = bilayer\nr0 = " << num(b.r0) << "\nr1 = " << num(b.r1)
        << "\nthickness_um = " << num(b.thickness_um) << "\nlayer_index = " << num(b.layer_index)
        << '\n';
      break;
    }
    case SampleKind::Tabulated: {
      std::vector<double> re, im;
      for (const cplx& r : sc.sample.table.r) {
        re.push_back(r.real());
        im.push_back(r.imag());
      }
      o << "type = tabulated\nomega_rad_per_fs = " << num_list(sc.sample.table.omega)
        << "\nr_re = " << num_list(re) << "\nr_im = " << num_list(im) << '\n';
      break;
    }
  }
  o << '\n';

  o << "[scan]\nrange = " << (sc.scan.automatic ? "auto" : "explicit") << '\n';
  if (!sc.scan.automatic)
    o << "start_mm = " << num(sc.scan.start_mm) << "\nstop_mm = " << num(sc.scan.stop_mm) << '\n';
  o << "points = " << sc.scan.points << "\nfringes = " << (sc.scan.fringes ? "true" : "false")
    << "\n\n";

  const auto& q = sc.grid.quadrature;
  o << "[grid]\npoints = " << sc.grid.points << "\nkernel = " << to_string(sc.grid.kernel)
    << "\npump_extent = " << num(q.pump_extent) << "\npump_nodes = " << q.pump_nodes
    << "\nmismatch_extent = " << num(q.mismatch_extent) << "\nmismatch_step = " << num(q.mismatch_step)
    << "\n\n";

  o << "[tasks]\nrun = ";
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) o << (k ? ", " : "") << to_string(sc.tasks[k]);
  o << "\n\n";

  o << "[output]\ndir = " << sc.output.dir << "\nformat = " << to_string(sc.output.format) << '\n';
  if (!sc.output.prefix.empty()) o << "prefix = " << sc.output.prefix << '\n';
  return o.str();
}

std::vector<PresetInfo> list_presets() {
  return {
      {"mgo-ln-532", "crystal",
       "MgO:LiNbO3, 532 nm -> 810 nm + 1550 nm, D = -263.50 fs/mm, D_plus = 780 fs/mm "
       "(set length_mm)"},
      {"glass-slab-20um", "sample",
       "20 um glass layer (n = 1.5) between air (n = 1) and water (n = 1.3)"},
  };
}

}  // namespace nlint
