"""Long-lived services owning shared resources such as worker pools."""
