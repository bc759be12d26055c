"""Architectural boundary tests using pytest-archon.

These tests verify the hexagonal layering:
- Domain layer has no dependencies on adapters or application services
- Application services don't depend on adapters
- Adapters don't depend on application services
- Only the CLI wires adapters to services
"""

from pytest_archon import archrule


def test_domain_models_have_no_dependencies() -> None:
    """Domain models should only import the domain itself (contracts for type hints)."""
    (
        archrule("domain models", comment="Domain models should be independent")
        .match("loopshaped_mpc.domain.models*")
        .should_not_import("loopshaped_mpc.adapters*")
        .should_not_import("loopshaped_mpc.application*")
        .should_not_import("loopshaped_mpc.domain.ports*")
        .may_import("loopshaped_mpc.domain.models*")
        .may_import("loopshaped_mpc.domain.contracts*")
        .check("loopshaped_mpc")
    )


def test_domain_contracts_and_ports_have_no_outer_dependencies() -> None:
    """Domain contracts and ports should not import adapters or application."""
    for layer in ("contracts", "ports"):
        (
            archrule(f"domain {layer}", comment=f"Domain {layer} should be independent")
            .match(f"loopshaped_mpc.domain.{layer}*")
            .should_not_import("loopshaped_mpc.adapters*")
            .should_not_import("loopshaped_mpc.application*")
            .should_not_import("loopshaped_mpc.cli")
            .may_import("loopshaped_mpc.domain*")
            .check("loopshaped_mpc")
        )


def test_application_services_dont_import_adapters() -> None:
    """Application services should not depend on adapters (infrastructure layer)."""
    (
        archrule(
            "application services", comment="Application services should not depend on adapters"
        )
        .match("loopshaped_mpc.application*")
        .should_not_import("loopshaped_mpc.adapters*")
        .should_not_import("loopshaped_mpc.cli")
        .may_import("loopshaped_mpc.domain*")
        .may_import("loopshaped_mpc.application*")
        .check("loopshaped_mpc")
    )


def test_adapters_dont_import_application() -> None:
    """Adapters should not import application services (to avoid cycles)."""
    (
        archrule(
            "adapters independence", comment="Adapters should not depend on application services"
        )
        .match("loopshaped_mpc.adapters*")
        .should_not_import("loopshaped_mpc.application*")
        .may_import("loopshaped_mpc.domain*")
        .may_import("loopshaped_mpc.adapters*")
        .check("loopshaped_mpc", only_direct_imports=True)
    )


def test_no_circular_dependencies_in_domain() -> None:
    """Domain layer should not have circular dependencies."""
    (
        archrule("domain no cycles", comment="Domain layer should not have circular dependencies")
        .match("loopshaped_mpc.domain*")
        .should_not_import("loopshaped_mpc.adapters*")
        .should_not_import("loopshaped_mpc.application*")
        .may_import("loopshaped_mpc.domain*")
        .check("loopshaped_mpc", only_direct_imports=True)
    )
