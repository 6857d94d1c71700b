#include "icnslice/core/fib.hpp"

#include <algorithm>

namespace icnslice::core {

Fib::Fib()
  : m_root(std::make_unique<Node>())
{
}

Fib::~Fib() = default;
Fib::Fib(Fib&&) noexcept = default;
Fib& Fib::operator=(Fib&&) noexcept = default;

Fib::Fib(const Fib& other)
  : Fib()
{
  for (auto& e : other.entries()) {
    insert(e.prefix, e.nexthops);
  }
}

Fib&
Fib::operator=(const Fib& other)
{
  if (this != &other) {
    Fib copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void
Fib::insert(const Name& prefix, std::vector<FaceId> nexthops)
{
  Node* node = m_root.get();
  for (const auto& c : prefix.components()) {
    auto& child = node->children[c];
    if (!child) {
      child = std::make_unique<Node>();
    }
    node = child.get();
  }
  if (!node->entry) {
    ++m_size;
  }
  node->entry = FibEntry{prefix, std::move(nexthops)};
}

void
Fib::addNextHop(const Name& prefix, FaceId face)
{
  if (auto* node = findNode(prefix); node != nullptr && node->entry) {
    auto& hops = node->entry->nexthops;
    if (std::find(hops.begin(), hops.end(), face) == hops.end()) {
      hops.push_back(face);
    }
    return;
  }
  insert(prefix, {face});
}

Fib::Node*
Fib::findNode(const Name& prefix) const
{
  Node* node = m_root.get();
  for (const auto& c : prefix.components()) {
    auto it = node->children.find(c);
    if (it == node->children.end()) {
      return nullptr;
    }
    node = it->second.get();
  }
  return node;
}

bool
Fib::prune(Node& node, const Name& prefix, std::size_t depth, std::size_t& erased)
{
  if (depth == prefix.size()) {
    if (node.entry) {
      node.entry.reset();
      ++erased;
    }
  }
  else {
    auto it = node.children.find(prefix.at(depth));
    if (it != node.children.end() && prune(*it->second, prefix, depth + 1, erased)) {
      node.children.erase(it);
    }
  }
  return !node.entry && node.children.empty();
}

bool
Fib::erase(const Name& prefix)
{
  std::size_t erased = 0;
  prune(*m_root, prefix, 0, erased);
  m_size -= erased;
  return erased > 0;
}

void
Fib::removeFace(FaceId face)
{
  std::vector<Name> emptied;
  for (auto& e : entries()) {
    auto* node = findNode(e.prefix);
    auto& hops = node->entry->nexthops;
    hops.erase(std::remove(hops.begin(), hops.end(), face), hops.end());
    if (hops.empty()) {
      emptied.push_back(e.prefix);
    }
  }
  for (const auto& p : emptied) {
    erase(p);
  }
}

const FibEntry*
Fib::findLongestPrefixMatch(const Name& name) const
{
  const FibEntry* best = nullptr;
  const Node* node = m_root.get();
  for (const auto& c : name.components()) {
    auto it = node->children.find(c);
    if (it == node->children.end()) {
      break;
    }
    node = it->second.get();
    if (node->entry) {
      best = &*node->entry;
    }
  }
  return best;
}

const FibEntry*
Fib::findExactMatch(const Name& prefix) const
{
  auto* node = findNode(prefix);
  return node != nullptr && node->entry ? &*node->entry : nullptr;
}

void
Fib::collect(const Node& node, std::vector<FibEntry>& out)
{
  if (node.entry) {
    out.push_back(*node.entry);
  }
  for (const auto& [_, child] : node.children) {
    collect(*child, out);
  }
}

std::vector<FibEntry>
Fib::entries() const
{
  std::vector<FibEntry> out;
  out.reserve(m_size);
  collect(*m_root, out);
  return out;
}

std::optional<FibEntry>
longestPrefixMatch(const Fib& fib, const Name& name)
{
  if (const auto* e = fib.findLongestPrefixMatch(name)) {
    return *e;
  }
  return std::nullopt;
}

} // namespace icnslice::core
