#include "icnslice/substrate/topology.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <tuple>
#include <fstream>
#include <set>
#include <sstream>

namespace icnslice::substrate {

using nlohmann::json;

std::string
toString(NodeRole role)
{
  switch (role) {
    case NodeRole::AccessPoa:
      return "access_poa";
    case NodeRole::Edge:
      return "edge";
    case NodeRole::Core:
      return "core";
    case NodeRole::Datacenter:
      return "datacenter";
  }
  return "unknown";
}

std::string
toString(AccessType type)
{
  switch (type) {
    case AccessType::LTE:
      return "LTE";
    case AccessType::WiFi:
      return "WiFi";
    case AccessType::Ethernet:
      return "Ethernet";
  }
  return "unknown";
}

std::optional<NodeRole>
parseNodeRole(std::string_view text)
{
  for (auto r : {NodeRole::AccessPoa, NodeRole::Edge, NodeRole::Core, NodeRole::Datacenter}) {
    if (toString(r) == text) {
      return r;
    }
  }
  return std::nullopt;
}

std::optional<AccessType>
parseAccessType(std::string_view text)
{
  auto lower = [] (std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [] (unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  for (auto t : {AccessType::LTE, AccessType::WiFi, AccessType::Ethernet}) {
    if (lower(toString(t)) == lower(text)) {
      return t;
    }
  }
  return std::nullopt;
}

AccessPreset
accessPreset(AccessType type)
{
  switch (type) {
    case AccessType::LTE:
      return {50.0, 20.0};
    case AccessType::WiFi:
      return {10.0, 100.0};
    case AccessType::Ethernet:
      return {1.0, 1000.0};
  }
  return {1.0, 1000.0};
}

namespace {

const json&
field(const json& obj, const std::string& path, const char* key)
{
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(path + "." + key + ": missing");
  }
  return obj.at(key);
}

std::string
stringField(const json& obj, const std::string& path, const char* key)
{
  const auto& v = field(obj, path, key);
  if (!v.is_string()) {
    throw SchemaError(path + "." + key + ": expected string");
  }
  return v.get<std::string>();
}

double
numberField(const json& obj, const std::string& path, const char* key)
{
  const auto& v = field(obj, path, key);
  if (!v.is_number()) {
    throw SchemaError(path + "." + key + ": expected number");
  }
  return v.get<double>();
}

std::int64_t
integerField(const json& obj, const std::string& path, const char* key)
{
  const auto& v = field(obj, path, key);
  if (!v.is_number_integer()) {
    throw SchemaError(path + "." + key + ": expected integer");
  }
  return v.get<std::int64_t>();
}

} // namespace

Topology
Topology::fromJson(const json& doc)
{
  if (!doc.is_object()) {
    throw SchemaError("topology: expected object");
  }
  const auto& nodes = field(doc, "topology", "nodes");
  const auto& links = field(doc, "topology", "links");
  if (!nodes.is_array()) {
    throw SchemaError("topology.nodes: expected array");
  }
  if (!links.is_array()) {
    throw SchemaError("topology.links: expected array");
  }

  Topology topo;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string path = "nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    PhysNode node;
    node.id = stringField(n, path, "id");
    auto roleText = stringField(n, path, "role");
    auto role = parseNodeRole(roleText);
    if (!role) {
      throw SchemaError(path + ".role: unknown role '" + roleText + "'");
    }
    node.role = *role;
    node.compute_capacity = integerField(n, path, "compute");
    node.storage_capacity_mb = integerField(n, path, "storage_mb");
    node.domain = stringField(n, path, "domain");
    if (!topo.m_nodes.emplace(node.id, node).second) {
      throw ValidationError(path + ".id: duplicate node '" + node.id + "'");
    }
  }

  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string path = "links[" + std::to_string(i) + "]";
    const auto& l = links[i];
    PhysLink link;
    link.id = stringField(l, path, "id");
    link.a = stringField(l, path, "a");
    link.b = stringField(l, path, "b");
    if (l.contains("access_type") && !l.at("access_type").is_null()) {
      auto typeText = stringField(l, path, "access_type");
      auto type = parseAccessType(typeText);
      if (!type) {
        throw SchemaError(path + ".access_type: unknown access type '" + typeText + "'");
      }
      link.access_type = type;
      auto preset = accessPreset(*type);
      link.bandwidth_mbps = l.contains("bandwidth_mbps") ? numberField(l, path, "bandwidth_mbps")
                                                         : preset.bandwidth_mbps;
      link.latency_ms = l.contains("latency_ms") ? numberField(l, path, "latency_ms")
                                                 : preset.latency_ms;
    }
    else {
      link.bandwidth_mbps = numberField(l, path, "bandwidth_mbps");
      link.latency_ms = numberField(l, path, "latency_ms");
    }
    if (!topo.m_links.emplace(link.id, link).second) {
      throw ValidationError(path + ".id: duplicate link '" + link.id + "'");
    }
  }

  topo.validate();
  return topo;
}

Topology
Topology::parse(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  }
  catch (const json::parse_error& e) {
    throw SchemaError(std::string("topology: invalid JSON: ") + e.what());
  }
  return fromJson(doc);
}

Topology
Topology::loadFile(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("cannot open topology file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

json
Topology::toJson() const
{
  json nodes = json::array();
  for (const auto& [_, n] : m_nodes) {
    nodes.push_back({{"id", n.id}, {"role", toString(n.role)}, {"compute", n.compute_capacity},
                     {"storage_mb", n.storage_capacity_mb}, {"domain", n.domain}});
  }
  json links = json::array();
  for (const auto& [_, l] : m_links) {
    json j = {{"id", l.id}, {"a", l.a}, {"b", l.b}, {"bandwidth_mbps", l.bandwidth_mbps},
              {"latency_ms", l.latency_ms}};
    if (l.access_type) {
      j["access_type"] = toString(*l.access_type);
    }
    links.push_back(std::move(j));
  }
  return {{"nodes", nodes}, {"links", links}};
}

void
Topology::validate()
{
  for (const auto& [id, n] : m_nodes) {
    if (n.compute_capacity <= 0) {
      throw ValidationError("node '" + id + "': compute capacity must be positive");
    }
    if (n.storage_capacity_mb <= 0) {
      throw ValidationError("node '" + id + "': storage capacity must be positive");
    }
    m_adjacency[id];
  }

  std::size_t infraLinks = 0;
  for (const auto& [id, l] : m_links) {
    if (!(l.bandwidth_mbps > 0)) {
      throw ValidationError("link '" + id + "': bandwidth must be positive");
    }
    if (!(l.latency_ms > 0)) {
      throw ValidationError("link '" + id + "': latency must be positive");
    }
    if (l.isAccess()) {
      auto poa = m_nodes.find(l.a);
      if (poa == m_nodes.end()) {
        throw ValidationError("access link '" + id + "': unknown PoA '" + l.a + "'");
      }
      if (poa->second.role != NodeRole::AccessPoa) {
        throw ValidationError("access link '" + id + "': '" + l.a + "' is not an access_poa");
      }
      if (m_nodes.count(l.b) > 0) {
        throw ValidationError("access link '" + id + "': client side '" + l.b +
                              "' must not be a substrate node");
      }
      continue;
    }
    if (m_nodes.count(l.a) == 0 || m_nodes.count(l.b) == 0) {
      throw ValidationError("link '" + id + "': dangling endpoint");
    }
    if (l.a == l.b) {
      throw ValidationError("link '" + id + "': self loop");
    }
    ++infraLinks;
    m_adjacency[l.a].push_back({l.b, id});
    m_adjacency[l.b].push_back({l.a, id});
  }
  for (auto& [_, adj] : m_adjacency) {
    std::sort(adj.begin(), adj.end(), [] (const Neighbor& x, const Neighbor& y) {
      return std::tie(x.node, x.link) < std::tie(y.node, y.link);
    });
  }

  if (m_nodes.size() < 2 || infraLinks == 0) {
    throw ValidationError("topology needs at least two connected nodes");
  }
  auto reach = hopDistances(m_nodes.begin()->first);
  if (reach.size() != m_nodes.size()) {
    throw ValidationError("topology is disconnected");
  }
}

const PhysNode&
Topology::node(const NodeId& id) const
{
  auto it = m_nodes.find(id);
  if (it == m_nodes.end()) {
    throw std::out_of_range("unknown node " + id);
  }
  return it->second;
}

const PhysLink&
Topology::link(const LinkId& id) const
{
  auto it = m_links.find(id);
  if (it == m_links.end()) {
    throw std::out_of_range("unknown link " + id);
  }
  return it->second;
}

const std::vector<Neighbor>&
Topology::neighbors(const NodeId& id) const
{
  static const std::vector<Neighbor> none;
  auto it = m_adjacency.find(id);
  return it == m_adjacency.end() ? none : it->second;
}

std::vector<const PhysLink*>
Topology::accessLinks(const NodeId& poa) const
{
  std::vector<const PhysLink*> out;
  for (const auto& [_, l] : m_links) {
    if (l.isAccess() && l.a == poa) {
      out.push_back(&l);
    }
  }
  return out;
}

const PhysLink*
Topology::accessLink(const NodeId& poa, AccessType type) const
{
  for (const auto* l : accessLinks(poa)) {
    if (*l->access_type == type) {
      return l;
    }
  }
  return nullptr;
}

std::map<NodeId, int>
Topology::hopDistances(const NodeId& from) const
{
  std::map<NodeId, int> dist;
  if (m_nodes.count(from) == 0) {
    return dist;
  }
  std::deque<NodeId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (const auto& nb : neighbors(u)) {
      if (dist.count(nb.node) == 0) {
        dist[nb.node] = dist[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return dist;
}

int
Topology::hopDistance(const NodeId& from, const NodeId& to) const
{
  auto d = hopDistances(from);
  auto it = d.find(to);
  return it == d.end() ? -1 : it->second;
}

std::vector<std::string>
Topology::domains() const
{
  std::set<std::string> ds;
  for (const auto& [_, n] : m_nodes) {
    ds.insert(n.domain);
  }
  return {ds.begin(), ds.end()};
}

} // namespace icnslice::substrate
