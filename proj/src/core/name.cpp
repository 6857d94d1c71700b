#include "icnslice/core/name.hpp"

namespace icnslice::core {

static void
checkComponent(const std::string& c)
{
  if (c.empty()) {
    throw ParseError("empty name component");
  }
  if (c.find('/') != std::string::npos) {
    throw ParseError("name component contains '/': " + c);
  }
}

Name
Name::parse(std::string_view text)
{
  if (text.empty()) {
    throw ParseError("empty name");
  }
  if (text.front() != '/') {
    throw ParseError("name must begin with '/': " + std::string(text));
  }

  std::vector<std::string> components;
  std::size_t pos = 1;
  while (pos <= text.size()) {
    std::size_t next = text.find('/', pos);
    if (next == std::string_view::npos) {
      next = text.size();
    }
    auto piece = text.substr(pos, next - pos);
    if (piece.empty()) {
      // a single trailing '/' is tolerated and canonicalized away
      if (next == text.size() && !components.empty()) {
        break;
      }
      throw ParseError("empty name component in " + std::string(text));
    }
    components.emplace_back(piece);
    pos = next + 1;
  }
  return Name(std::move(components));
}

Name::Name(std::vector<std::string> components)
  : m_components(std::move(components))
{
  if (m_components.empty()) {
    throw ParseError("name needs at least one component");
  }
  for (const auto& c : m_components) {
    checkComponent(c);
  }
}

Name
Name::prefix(std::size_t n) const
{
  if (n == 0 || n > m_components.size()) {
    throw std::out_of_range("name prefix length out of range");
  }
  return Name(std::vector<std::string>(m_components.begin(), m_components.begin() + n));
}

Name
Name::append(std::string component) const
{
  auto copy = m_components;
  copy.push_back(std::move(component));
  return Name(std::move(copy));
}

Name
Name::append(const Name& suffix) const
{
  auto copy = m_components;
  copy.insert(copy.end(), suffix.m_components.begin(), suffix.m_components.end());
  return Name(std::move(copy));
}

bool
Name::isPrefixOf(const Name& other) const
{
  if (m_components.size() > other.m_components.size()) {
    return false;
  }
  for (std::size_t i = 0; i < m_components.size(); ++i) {
    if (m_components[i] != other.m_components[i]) {
      return false;
    }
  }
  return true;
}

std::string
Name::toUri() const
{
  std::string out;
  for (const auto& c : m_components) {
    out += '/';
    out += c;
  }
  return out;
}

std::ostream&
operator<<(std::ostream& os, const Name& name)
{
  return os << name.toUri();
}

} // namespace icnslice::core
