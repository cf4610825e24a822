"""Cross-account detection of Copy-Pasta, Rewording and Translation in short social-media messages."""
