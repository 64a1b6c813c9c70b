#include "tmc/mesh_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tmc {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& msg) {
  throw MeshError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string tag_to_string(const DomainTag& tag) {
  if (tag.is_medium()) return "medium";
  return "solid:" + std::to_string(tag.body_id);
}

DomainTag tag_from_string(const std::string& s, const std::string& path, int line) {
  if (s == "medium") return DomainTag::medium();
  if (s.rfind("solid:", 0) == 0) {
    try {
      return DomainTag::solid(std::stoi(s.substr(6)));
    } catch (const std::exception&) {
      parse_fail(path, line, "bad body id in tag '" + s + "'");
    }
  }
  parse_fail(path, line, "unknown domain tag '" + s + "'");
}

void check_format(const std::string& format) {
  if (format != "text") throw MeshError("unsupported mesh format '" + format + "'");
}

}  // namespace

Mesh load_mesh(const std::string& path, const std::string& format) {
  check_format(format);
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");

  Mesh mesh;
  int declared_nodes = -1, declared_elements = -1;
  int lineno = 0;
  bool saw_magic = false, saw_end = false;
  std::string line;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (saw_end) parse_fail(path, lineno, "content after 'end'");

    if (!saw_magic) {
      int version = 0;
      if (key != "tmcmesh" || !(ls >> version) || version != 1)
        parse_fail(path, lineno, "expected header 'tmcmesh 1'");
      saw_magic = true;
      continue;
    }

    if (key == "nodes") {
      if (!(ls >> declared_nodes) || declared_nodes < 0) parse_fail(path, lineno, "bad node count");
    } else if (key == "elements") {
      if (!(ls >> declared_elements) || declared_elements < 0)
        parse_fail(path, lineno, "bad element count");
    } else if (key == "node") {
      Node n;
      if (!(ls >> n.id >> n.X.x() >> n.X.y() >> n.X.z()))
        parse_fail(path, lineno, "malformed node record");
      if (n.id != static_cast<int>(mesh.nodes.size()))
        parse_fail(path, lineno, "node ids must be dense and in order");
      if (!n.X.allFinite()) parse_fail(path, lineno, "non-finite node coordinates");
      mesh.nodes.push_back(n);
    } else if (key == "element") {
      Hex20Element el;
      std::string tag;
      int nnodes = 0;
      if (!(ls >> el.id >> tag >> nnodes)) parse_fail(path, lineno, "malformed element record");
      if (nnodes != 20)
        parse_fail(path, lineno,
                   "unsupported element type: expected 20 nodes, got " + std::to_string(nnodes));
      el.tag = tag_from_string(tag, path, lineno);
      if (el.id != static_cast<int>(mesh.elements.size()))
        parse_fail(path, lineno, "element ids must be dense and in order");
      for (int I = 0; I < 20; ++I)
        if (!(ls >> el.nodes[I])) parse_fail(path, lineno, "element record is missing node ids");
      mesh.elements.push_back(el);
    } else if (key == "nodeset") {
      std::string name;
      int count = 0;
      if (!(ls >> name >> count) || count < 0) parse_fail(path, lineno, "malformed nodeset record");
      std::vector<int> ids(count);
      for (int& id : ids)
        if (!(ls >> id)) parse_fail(path, lineno, "nodeset record is missing ids");
      mesh.node_sets[name] = std::move(ids);
    } else if (key == "sideset") {
      std::string name;
      int count = 0;
      if (!(ls >> name >> count) || count < 0) parse_fail(path, lineno, "malformed sideset record");
      std::vector<SideRef> refs(count);
      for (SideRef& sr : refs)
        if (!(ls >> sr.element >> sr.face)) parse_fail(path, lineno, "sideset record is missing pairs");
      mesh.side_sets[name] = std::move(refs);
    } else if (key == "end") {
      saw_end = true;
    } else {
      parse_fail(path, lineno, "unknown field '" + key + "'");
    }

    std::string extra;
    if (key != "nodeset" && key != "sideset" && (ls >> extra))
      parse_fail(path, lineno, "trailing content '" + extra + "'");
  }

  if (!saw_magic) throw MeshError(path + ": empty or missing header");
  if (!saw_end) throw MeshError(path + ": missing 'end'");
  if (declared_nodes >= 0 && declared_nodes != static_cast<int>(mesh.nodes.size()))
    throw MeshError(path + ": node count mismatch");
  if (declared_elements >= 0 && declared_elements != static_cast<int>(mesh.elements.size()))
    throw MeshError(path + ": element count mismatch");

  const ValidationReport rep = validate_mesh(mesh);
  if (!rep.ok) {
    std::string msg = path + ": mesh failed validation";
    for (const std::string& f : rep.failures) msg += "\n  " + f;
    if (!(rep.min_detG > 0.0)) msg += "\n  min det(G) = " + std::to_string(rep.min_detG);
    throw MeshError(msg);
  }
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path, const std::string& format) {
  check_format(format);
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw MeshError("cannot write mesh file '" + path + "'");

  std::fprintf(f, "tmcmesh 1\n");
  std::fprintf(f, "nodes %zu\n", mesh.nodes.size());
  std::fprintf(f, "elements %zu\n", mesh.elements.size());
  for (const Node& n : mesh.nodes)
    std::fprintf(f, "node %d %.17g %.17g %.17g\n", n.id, n.X.x(), n.X.y(), n.X.z());
  for (const Hex20Element& el : mesh.elements) {
    std::fprintf(f, "element %d %s 20", el.id, tag_to_string(el.tag).c_str());
    for (int id : el.nodes) std::fprintf(f, " %d", id);
    std::fprintf(f, "\n");
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    std::fprintf(f, "nodeset %s %zu", name.c_str(), ids.size());
    for (int id : ids) std::fprintf(f, " %d", id);
    std::fprintf(f, "\n");
  }
  for (const auto& [name, refs] : mesh.side_sets) {
    std::fprintf(f, "sideset %s %zu", name.c_str(), refs.size());
    for (const SideRef& sr : refs) std::fprintf(f, " %d %d", sr.element, sr.face);
    std::fprintf(f, "\n");
  }
  std::fprintf(f, "end\n");
  std::fclose(f);
}

}  // namespace tmc
