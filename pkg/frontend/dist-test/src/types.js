/** DTOs mirroring the server's bundle records and admin responses. */
export {};
