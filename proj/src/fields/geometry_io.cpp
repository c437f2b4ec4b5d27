#include "paultrap/fields/geometry_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "paultrap/model.hpp"

namespace paultrap {

namespace {

class GeometryReader {
 public:
  explicit GeometryReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
    msg << ": " << what;
    throw SchemaError(msg.str());
  }

  int line(const YAML::Node& node) const { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsDefined() || !node.IsScalar()) fail(node, what + ": expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, what + ": '" + node.Scalar() + "' is not a number");
    }
  }

  Vec3 vec(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() != 3) fail(node, what + ": expected [x, y, z]");
    return Vec3(number(node[0], what), number(node[1], what), number(node[2], what)) * scale_;
  }

  void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                  const std::string& where) const {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  BoxPrimitive box(const YAML::Node& n) const {
    if (!n.IsMap()) fail(n, "box: expected a mapping");
    check_keys(n, {"min", "max", "open"}, "box");
    BoxPrimitive b{vec(n["min"], "box.min"), vec(n["max"], "box.max"), {}};
    if (!((b.max - b.min).minCoeff() > 0.0)) fail(n, "box: max must exceed min on every axis");
    if (n["open"]) {
      if (!n["open"].IsSequence()) fail(n["open"], "box.open: expected a list of face names");
      for (const auto& f : n["open"]) {
        const auto face = f.as<std::string>();
        static const std::set<std::string> faces{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
        if (!faces.count(face)) fail(f, "box.open: unknown face '" + face + "'");
        b.open_faces.push_back(face);
      }
    }
    return b;
  }

  RectPrimitive rect(const YAML::Node& n) const {
    if (!n.IsMap()) fail(n, "rect: expected a mapping");
    check_keys(n, {"origin", "u", "v"}, "rect");
    RectPrimitive r{vec(n["origin"], "rect.origin"), vec(n["u"], "rect.u"), vec(n["v"], "rect.v")};
    if (!(r.u.cross(r.v).norm() > 0.0)) fail(n, "rect: edges u and v span zero area");
    return r;
  }

  SpherePrimitive sphere(const YAML::Node& n) const {
    if (!n.IsMap()) fail(n, "sphere: expected a mapping");
    check_keys(n, {"center", "radius"}, "sphere");
    SpherePrimitive s{vec(n["center"], "sphere.center"), number(n["radius"], "sphere.radius") * scale_};
    if (!(s.radius > 0.0)) fail(n["radius"], "sphere.radius must be positive");
    return s;
  }

  Electrode electrode(const YAML::Node& n, int dc_index) const {
    if (!n.IsMap()) fail(n, "electrode entry must be a mapping");
    check_keys(n, {"name", "role", "box", "boxes", "rect", "rects", "sphere", "spheres", "panels"},
               "electrode");
    Electrode e;
    e.source_line = line(n);
    if (!n["name"] || !n["name"].IsScalar()) fail(n, "electrode: missing 'name'");
    e.name = n["name"].as<std::string>();
    if (!n["role"] || !n["role"].IsScalar()) fail(n, "electrode '" + e.name + "': missing 'role'");
    const auto role = n["role"].as<std::string>();
    if (role == "RF+" || role == "RF_PLUS") e.role = {RoleKind::RfPlus, 0};
    else if (role == "RF-" || role == "RF_MINUS") e.role = {RoleKind::RfMinus, 0};
    else if (role == "DC") e.role = {RoleKind::Dc, dc_index};
    else fail(n["role"], "electrode '" + e.name + "': role must be RF+, RF- or DC, got '" + role + "'");

    auto one_or_many = [&](const char* single, const char* many, auto&& parse) {
      if (n[single]) e.primitives.emplace_back(parse(n[single]));
      if (n[many]) {
        if (!n[many].IsSequence()) fail(n[many], std::string(many) + ": expected a list");
        for (const auto& item : n[many]) e.primitives.emplace_back(parse(item));
      }
    };
    one_or_many("box", "boxes", [&](const YAML::Node& x) { return Primitive{box(x)}; });
    one_or_many("rect", "rects", [&](const YAML::Node& x) { return Primitive{rect(x)}; });
    one_or_many("sphere", "spheres", [&](const YAML::Node& x) { return Primitive{sphere(x)}; });

    if (n["panels"]) {
      if (!n["panels"].IsSequence()) fail(n["panels"], "panels: expected a list of vertex lists");
      std::size_t idx = 0;
      for (const auto& pn : n["panels"]) {
        if (!pn.IsSequence() || (pn.size() != 3 && pn.size() != 4))
          fail(pn, "electrode '" + e.name + "' panel #" + std::to_string(idx) +
                       ": expected 3 or 4 vertices");
        Panel p;
        for (const auto& v : pn) p.vertices.push_back(vec(v, "panel vertex"));
        if (!(p.area() > 0.0))
          fail(pn, "electrode '" + e.name + "' panel #" + std::to_string(idx) + " has zero area");
        if (p.non_planarity() > 1e-6)
          fail(pn, "electrode '" + e.name + "' panel #" + std::to_string(idx) + " is not planar");
        e.panels.push_back(std::move(p));
        ++idx;
      }
    }
    if (e.primitives.empty() && e.panels.empty())
      fail(n, "electrode '" + e.name + "' has no surface (box, rect, sphere or panels)");
    return e;
  }

  ElectrodeSystem system(const YAML::Node& root) {
    if (!root.IsMap()) fail(root, "geometry document must be a mapping");
    check_keys(root, {"name", "units", "characteristic_distance", "electrodes", "description"},
               "geometry");
    if (root["units"]) {
      const auto u = root["units"].as<std::string>();
      if (u == "um" || u == "µm") scale_ = 1e-6;
      else if (u == "mm") scale_ = 1e-3;
      else fail(root["units"], "units must be um or mm, got '" + u + "'");
    }
    ElectrodeSystem s;
    s.name = root["name"] ? root["name"].as<std::string>() : std::string("unnamed");
    if (!root["characteristic_distance"]) fail(root, "missing 'characteristic_distance'");
    s.characteristic_distance = number(root["characteristic_distance"], "characteristic_distance") * scale_;
    if (!(s.characteristic_distance > 0.0))
      fail(root["characteristic_distance"], "characteristic_distance must be positive");
    const YAML::Node list = root["electrodes"];
    if (!list || !list.IsSequence() || list.size() == 0)
      fail(root, "'electrodes' must be a non-empty list");
    std::map<std::string, int> names;
    int dc_index = 0;
    for (const auto& en : list) {
      Electrode e = electrode(en, dc_index);
      if (auto [it, inserted] = names.emplace(e.name, e.source_line); !inserted)
        fail(en["name"], "duplicate electrode name '" + e.name + "' (first defined at line " +
                             std::to_string(it->second) + ")");
      if (e.role.kind == RoleKind::Dc) ++dc_index;
      s.electrodes.push_back(std::move(e));
    }
    if (std::none_of(s.electrodes.begin(), s.electrodes.end(),
                     [](const Electrode& e) { return e.role.is_rf(); }))
      fail(list, "geometry needs at least one RF electrode");
    return s;
  }

 private:
  std::string source_;
  double scale_ = 1e-6;
};

}  // namespace

ElectrodeSystem parse_geometry(const std::string& yaml_text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.mark.line + 1 << ": " << e.msg;
    throw SchemaError(msg.str());
  }
  GeometryReader reader(source_name);
  try {
    return reader.system(root);
  } catch (const YAML::Exception& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.mark.line + 1 << ": " << e.msg;
    throw SchemaError(msg.str());
  }
}

ElectrodeSystem load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open geometry file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_geometry(buf.str(), path);
}

}  // namespace paultrap
