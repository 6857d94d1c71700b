#ifndef ICNSLICE_CORE_NAME_HPP
#define ICNSLICE_CORE_NAME_HPP

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icnslice::core {

class ParseError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/** \brief Hierarchical content name, rendered as `/c1/c2/...`.
 *
 *  A Name always has at least one component, and no component is empty or
 *  contains '/'.
 */
class Name
{
public:
  /// Parses a URI-style name. Throws ParseError on malformed input.
  static Name
  parse(std::string_view text);

  explicit
  Name(std::vector<std::string> components);

  Name(std::initializer_list<std::string> components)
    : Name(std::vector<std::string>(components))
  {
  }

  std::size_t
  size() const
  {
    return m_components.size();
  }

  const std::string&
  at(std::size_t i) const
  {
    return m_components.at(i);
  }

  const std::vector<std::string>&
  components() const
  {
    return m_components;
  }

  /// First \p n components. \p n must be in [1, size()].
  Name
  prefix(std::size_t n) const;

  Name
  append(std::string component) const;

  Name
  append(const Name& suffix) const;

  bool
  isPrefixOf(const Name& other) const;

  std::string
  toUri() const;

  friend bool
  operator==(const Name&, const Name&) = default;

  friend std::strong_ordering
  operator<=>(const Name& a, const Name& b)
  {
    return a.m_components <=> b.m_components;
  }

private:
  std::vector<std::string> m_components;
};

std::ostream&
operator<<(std::ostream& os, const Name& name);

} // namespace icnslice::core

#endif // ICNSLICE_CORE_NAME_HPP
