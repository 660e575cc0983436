"""Client used by the CLI: remote HTTP or in-process ASGI transport.

Without a server URL the client runs requests against an in-process app
instance through the same HTTP/JSON layer, so one code path serves both
`physbench --server http://...` and standalone use.
"""

import asyncio
from typing import Optional

import httpx


class ServiceClient:
    def __init__(self, server: Optional[str] = None, timeout: float = 3600.0):
        self.server = server.rstrip("/") if server else None
        self.timeout = timeout
        self._app = None

    def _local_app(self):
        if self._app is None:
            from physbench.service.app import create_app

            self._app = create_app()
        return self._app

    def request(self, method: str, path: str, payload: Optional[dict] = None):
        """Returns (status_code, parsed JSON body)."""
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=self.timeout) as client:
                resp = client.request(method, path, json=payload)
                return resp.status_code, resp.json()

        async def run():
            transport = httpx.ASGITransport(app=self._local_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://physbench.local", timeout=self.timeout
            ) as client:
                resp = await client.request(method, path, json=payload)
                return resp.status_code, resp.json()

        return asyncio.run(run())

    def get(self, path: str):
        return self.request("GET", path)

    def post(self, path: str, payload: dict):
        return self.request("POST", path, payload)
