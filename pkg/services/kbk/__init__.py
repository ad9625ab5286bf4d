# Package marker to ensure imports work in pytest/CI.
