"""Smoke test: Import services.kbk.main and verify app exists.

This test catches regressions early if the app structure breaks.
"""


def test_import_main():
    """Test that services.kbk.main can be imported and app exists."""
    import services.kbk.main

    assert hasattr(services.kbk.main, "app"), "services.kbk.main must have 'app' attribute"
    assert services.kbk.main.app is not None, "app must not be None"
    assert hasattr(services.kbk.main.app, "router"), "app should have router attribute (FastAPI app)"


def test_main_app_title():
    """Test that app has expected metadata."""
    import services.kbk.main

    app = services.kbk.main.app
    assert app.title == "KBK Simulation API", "App title should be 'KBK Simulation API'"
    assert app.version == "0.1.0", "App version should be '0.1.0'"
