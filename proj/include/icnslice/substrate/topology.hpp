#ifndef ICNSLICE_SUBSTRATE_TOPOLOGY_HPP
#define ICNSLICE_SUBSTRATE_TOPOLOGY_HPP

#include "icnslice/common.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icnslice::substrate {

class SchemaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class NodeRole {
  AccessPoa,
  Edge,
  Core,
  Datacenter,
};

enum class AccessType {
  LTE,
  WiFi,
  Ethernet,
};

std::string
toString(NodeRole role);

std::string
toString(AccessType type);

std::optional<NodeRole>
parseNodeRole(std::string_view text);

std::optional<AccessType>
parseAccessType(std::string_view text);

struct AccessPreset
{
  double latency_ms;
  double bandwidth_mbps;
};

/// Default link parameters per access technology.
AccessPreset
accessPreset(AccessType type);

struct PhysNode
{
  NodeId id;
  NodeRole role = NodeRole::Edge;
  std::int64_t compute_capacity = 0;
  std::int64_t storage_capacity_mb = 0;
  std::string domain;
};

struct PhysLink
{
  LinkId id;
  NodeId a;
  NodeId b;
  double bandwidth_mbps = 0;
  double latency_ms = 0;
  /// Set on access links; `a` is then the PoA and `b` names the client side.
  std::optional<AccessType> access_type;

  bool
  isAccess() const
  {
    return access_type.has_value();
  }

  const NodeId&
  otherEnd(const NodeId& node) const
  {
    return node == a ? b : a;
  }
};

struct Neighbor
{
  NodeId node;
  LinkId link;
};

/** \brief Validated physical topology.
 *
 *  Infrastructure links connect substrate nodes; access links hang off
 *  access PoAs and carry participants.
 */
class Topology
{
public:
  /// Parses and validates a topology document.
  static Topology
  fromJson(const nlohmann::json& doc);

  static Topology
  parse(std::string_view text);

  static Topology
  loadFile(const std::string& path);

  nlohmann::json
  toJson() const;

  const std::map<NodeId, PhysNode>&
  nodes() const
  {
    return m_nodes;
  }

  const std::map<LinkId, PhysLink>&
  links() const
  {
    return m_links;
  }

  const PhysNode&
  node(const NodeId& id) const;

  const PhysLink&
  link(const LinkId& id) const;

  bool
  hasNode(const NodeId& id) const
  {
    return m_nodes.count(id) > 0;
  }

  /// Infrastructure neighbors ordered by (node id, link id).
  const std::vector<Neighbor>&
  neighbors(const NodeId& id) const;

  std::vector<const PhysLink*>
  accessLinks(const NodeId& poa) const;

  const PhysLink*
  accessLink(const NodeId& poa, AccessType type) const;

  /// BFS hop counts over infrastructure links.
  std::map<NodeId, int>
  hopDistances(const NodeId& from) const;

  int
  hopDistance(const NodeId& from, const NodeId& to) const;

  std::vector<std::string>
  domains() const;

private:
  void
  validate();

private:
  std::map<NodeId, PhysNode> m_nodes;
  std::map<LinkId, PhysLink> m_links;
  std::map<NodeId, std::vector<Neighbor>> m_adjacency;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_TOPOLOGY_HPP
