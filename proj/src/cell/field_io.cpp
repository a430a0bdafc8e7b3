#include "homog/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/serialize.hpp"

namespace homog {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

static_assert(std::endian::native == std::endian::little, "payload format assumes a little-endian host");

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

fs::path payload_path(const fs::path& header) {
  fs::path p = header;
  p.replace_extension(".bin");
  return p;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError(p.string() + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(p.string() + ": invalid JSON: " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FormatError(p.string() + ": cannot write");
  out << text;
}

}  // namespace

void write_field_file(const fs::path& header, const FieldFile& f) {
  std::size_t cells = 1;
  for (std::size_t k = 0; k < f.dim; ++k) cells *= f.n;
  if (f.payload.size() != cells * f.components.size())
    throw ContractViolation("field payload size does not match header");
  const fs::path bin = payload_path(header);
  const std::size_t bytes = f.payload.size() * sizeof(double);
  Json h{{"format", "homog-field"},
         {"version", 1},
         {"d", f.dim},
         {"N", f.n},
         {"kind", f.kind},
         {"order", f.order},
         {"components", f.components},
         {"payload", bin.filename().string()},
         {"bytes", bytes},
         {"dtype", "float64-le"},
         {"checksum", "fnv1a64:" + hex64(fnv1a64(f.payload.data(), bytes))}};
  if (f.kind == "coefficients") {
    h["lambda"] = f.lambda;
    h["description"] = f.description;
  }
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw FormatError(bin.string() + ": cannot write");
    out.write(reinterpret_cast<const char*>(f.payload.data()), static_cast<std::streamsize>(bytes));
  }
  write_text(header, h.dump(1) + "\n");
}

FieldFile read_field_file(const fs::path& header) {
  const Json h = read_json(header);
  FieldFile f;
  try {
    if (h.at("format") != "homog-field") throw FormatError(header.string() + ": not a field header");
    f.dim = h.at("d").get<std::size_t>();
    f.n = h.at("N").get<std::size_t>();
    f.kind = h.at("kind").get<std::string>();
    f.order = h.at("order").get<int>();
    f.components = h.at("components").get<std::vector<std::vector<int>>>();
    if (f.kind == "coefficients") {
      f.lambda = h.at("lambda").get<double>();
      f.description = h.value("description", std::string("file"));
    }
  } catch (const Json::exception& e) {
    throw FormatError(header.string() + ": bad header: " + e.what());
  }
  if (f.dim < 1 || f.dim > 3 || f.n < 2) throw FormatError(header.string() + ": bad grid size");
  const fs::path bin = header.parent_path() / h.at("payload").get<std::string>();
  std::size_t cells = 1;
  for (std::size_t k = 0; k < f.dim; ++k) cells *= f.n;
  const std::size_t count = cells * f.components.size();
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw FormatError(bin.string() + ": cannot open payload");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != count * sizeof(double))
    throw FormatError(bin.string() + ": payload has " + std::to_string(size) + " bytes, expected " +
                      std::to_string(count * sizeof(double)));
  in.seekg(0);
  f.payload.resize(count);
  in.read(reinterpret_cast<char*>(f.payload.data()), static_cast<std::streamsize>(size));
  const std::string want = h.value("checksum", std::string());
  const std::string got = "fnv1a64:" + hex64(fnv1a64(f.payload.data(), size));
  if (want != got) throw FormatError(bin.string() + ": checksum mismatch (" + got + " vs " + want + ")");
  for (double v : f.payload)
    if (!std::isfinite(v)) throw FormatError(bin.string() + ": non-finite value");
  return f;
}

void write_coefficient_field(const fs::path& header, const CoefficientField& a) {
  FieldFile f;
  f.dim = a.dim();
  f.n = a.shape().n;
  f.kind = "coefficients";
  f.lambda = a.lambda();
  f.description = a.description();
  const std::size_t d = a.dim(), cells = a.shape().size();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) f.components.push_back({static_cast<int>(i), static_cast<int>(j)});
  f.payload.resize(cells * d * d);
  for (std::size_t q = 0; q < d * d; ++q)
    for (std::size_t e = 0; e < cells; ++e) f.payload[q * cells + e] = a.at(e)[q];
  write_field_file(header, f);
}

CoefficientField read_coefficient_field(const fs::path& header) {
  FieldFile f = read_field_file(header);
  if (f.kind != "coefficients") throw FormatError(header.string() + ": not a coefficient field");
  const std::size_t d = f.dim;
  if (f.components.size() != d * d) throw FormatError(header.string() + ": expected d*d components");
  GridShape s(d, f.n);
  const std::size_t cells = s.size();
  std::vector<double> v(cells * d * d);
  for (std::size_t q = 0; q < d * d; ++q) {
    const auto& c = f.components[q];
    if (c.size() != 2 || static_cast<std::size_t>(c[0] * static_cast<int>(d) + c[1]) != q)
      throw FormatError(header.string() + ": coefficient components out of order");
    for (std::size_t e = 0; e < cells; ++e) v[e * d * d + q] = f.payload[q * cells + e];
  }
  return CoefficientField(s, std::move(v), f.lambda, f.description);
}

fs::path write_corrector_table(const CorrectorTable& t, const fs::path& dir) {
  fs::create_directories(dir);
  write_coefficient_field(dir / "coefficients.json", *t.field);
  Json orders = Json::array();
  for (int m = 0; m <= t.m_max; ++m) {
    FieldFile f;
    f.dim = t.dim();
    f.n = t.shape().n;
    f.kind = "corrector";
    f.order = m;
    for (const auto& [a, g] : t.phi[m]) {
      f.components.push_back(a.entries());
      f.payload.insert(f.payload.end(), g.values().begin(), g.values().end());
    }
    const std::string name = "phi_" + std::to_string(m) + ".json";
    write_field_file(dir / name, f);
    orders.push_back(Json{{"m", m}, {"file", name}, {"abar", to_json(t.abar[m])}, {"cg_iterations", t.iterations[m]}});
  }
  Json man{{"format", "homog-corrector-table"}, {"version", 1},           {"d", t.dim()},
           {"N", t.shape().n},                  {"m_max", t.m_max},       {"solver_tol", t.solver_tol},
           {"coefficients", "coefficients.json"}, {"orders", orders}};
  const fs::path p = dir / "manifest.json";
  write_text(p, man.dump(1) + "\n");
  return p;
}

CorrectorTable read_corrector_table(const fs::path& manifest) {
  const Json man = read_json(manifest);
  const fs::path dir = manifest.parent_path();
  CorrectorTable t;
  try {
    if (man.at("format") != "homog-corrector-table") throw FormatError(manifest.string() + ": not a manifest");
    t.field = std::make_shared<const CoefficientField>(
        read_coefficient_field(dir / man.at("coefficients").get<std::string>()));
    t.m_max = man.at("m_max").get<int>();
    t.solver_tol = man.at("solver_tol").get<double>();
    if (t.m_max < 0 || man.at("orders").size() != static_cast<std::size_t>(t.m_max + 1))
      throw FormatError(manifest.string() + ": order list does not match m_max");
    t.phi.resize(t.m_max + 1);
    t.abar.resize(t.m_max + 1);
    t.iterations.resize(t.m_max + 1);
    for (const auto& o : man.at("orders")) {
      const int m = o.at("m").get<int>();
      if (m < 0 || m > t.m_max) throw FormatError(manifest.string() + ": bad order");
      const fs::path fp = dir / o.at("file").get<std::string>();
      FieldFile f = read_field_file(fp);
      if (f.kind != "corrector" || f.order != m || f.dim != t.dim() || f.n != t.shape().n)
        throw FormatError(fp.string() + ": header does not match manifest");
      const std::size_t cells = t.shape().size();
      for (std::size_t c = 0; c < f.components.size(); ++c) {
        MultiIndex a(f.components[c]);
        if (a.order() != m || a.dim() != t.dim()) throw FormatError(fp.string() + ": bad component index");
        std::vector<double> v(f.payload.begin() + static_cast<std::ptrdiff_t>(c * cells),
                              f.payload.begin() + static_cast<std::ptrdiff_t>((c + 1) * cells));
        t.phi[m].emplace(a, GridFunction(t.shape(), std::move(v)));
      }
      t.abar[m] = real_tensor_from_json(o.at("abar"));
      t.iterations[m] = o.value("cg_iterations", std::size_t{0});
    }
  } catch (const Json::exception& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
  return t;
}

}  // namespace homog
