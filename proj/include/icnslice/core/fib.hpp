#ifndef ICNSLICE_CORE_FIB_HPP
#define ICNSLICE_CORE_FIB_HPP

#include "icnslice/common.hpp"
#include "icnslice/core/name.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace icnslice::core {

struct FibEntry
{
  Name prefix;
  /// Priority order; the forwarding strategy uses the first one.
  std::vector<FaceId> nexthops;

  friend bool
  operator==(const FibEntry&, const FibEntry&) = default;
};

/** \brief Name-prefix routing table stored as a component trie.
 *
 *  At most one entry exists per prefix.
 */
class Fib
{
public:
  Fib();
  ~Fib();
  Fib(Fib&&) noexcept;
  Fib& operator=(Fib&&) noexcept;
  Fib(const Fib& other);
  Fib& operator=(const Fib& other);

  /// Installs or replaces the entry for \p prefix.
  void
  insert(const Name& prefix, std::vector<FaceId> nexthops);

  /// Appends \p face to the entry's next hops, creating the entry when absent.
  void
  addNextHop(const Name& prefix, FaceId face);

  bool
  erase(const Name& prefix);

  /// Removes \p face from every entry; entries left without next hops are erased.
  void
  removeFace(FaceId face);

  const FibEntry*
  findLongestPrefixMatch(const Name& name) const;

  const FibEntry*
  findExactMatch(const Name& prefix) const;

  /// All entries in name order.
  std::vector<FibEntry>
  entries() const;

  std::size_t
  size() const
  {
    return m_size;
  }

private:
  struct Node
  {
    std::map<std::string, std::unique_ptr<Node>> children;
    std::optional<FibEntry> entry;
  };

  Node*
  findNode(const Name& prefix) const;

  static void
  collect(const Node& node, std::vector<FibEntry>& out);

  static bool
  prune(Node& node, const Name& prefix, std::size_t depth, std::size_t& erased);

private:
  std::unique_ptr<Node> m_root;
  std::size_t m_size = 0;
};

std::optional<FibEntry>
longestPrefixMatch(const Fib& fib, const Name& name);

} // namespace icnslice::core

#endif // ICNSLICE_CORE_FIB_HPP
